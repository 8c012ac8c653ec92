#pragma once

#include <optional>
#include <vector>

#include "graftrl/experience.hpp"
#include "graftrl/segment_library.hpp"

namespace graftrl {

class Rng;

struct GraftConfig {
    double eps = 0.5;        // junction distance threshold
    std::size_t n_ext = 10;  // extraction positions per authentic trajectory
    std::size_t n_gft = 10;  // grafting positions per authentic trajectory
    std::size_t theta = 5;   // cap on synthetic trajectories per authentic trajectory
};

// A head prefix of an authentic trajectory spliced onto a stored tail.
// Transitions are verbatim copies retagged Synthetic; the junction gap
// between head and tail is retained, bounded by the eps used at creation.
struct SyntheticTrajectory {
    Segment transitions;  // head then tail
    std::size_t head_length = 0;
    double junction_error = 0.0;
    double quality = 0.0;  // quality(head) + quality(tail)
};

// Distance between the head's terminal state and the tail's initial state.
double grafting_error(const Segment& head, const Segment& tail);

// Splices head onto tail when grafting_error(head, tail) < eps (strictly);
// empty otherwise.
std::optional<SyntheticTrajectory> unite(const Segment& head, const Segment& tail, double eps);

// Keeps candidates whose quality is at least the authentic trajectory's.
// When more than theta qualify, sorts by quality descending (stable, so
// earlier generation wins ties) and truncates to theta; otherwise the
// qualifying candidates keep their generation order.
std::vector<SyntheticTrajectory> select_top(const Trajectory& authentic,
                                            std::vector<SyntheticTrajectory> candidates,
                                            std::size_t theta);

struct GraftStats {
    std::size_t candidates_found = 0;      // distinct successful unions
    std::size_t candidates_qualified = 0;  // passing the quality filter
    std::size_t returned = 0;
};

// One grafting pass over a single authentic trajectory.
//
// Phase 1 inserts n_ext random tail slices of the trajectory into the
// library. Phase 2 draws n_gft random positions q, retrieves stored tails
// near the post-state of position q, and splices the prefix through q onto
// each of them. The candidate pool is a content set: duplicate splices
// collapse, and exact reconstructions of the input trajectory are dropped.
// The top-theta quality selection of the pool is returned.
std::vector<SyntheticTrajectory> graft(const GraftConfig& cfg, const Trajectory& authentic,
                                       SegmentLibrary& lib, Rng& rng,
                                       GraftStats* stats = nullptr);

}  // namespace graftrl
