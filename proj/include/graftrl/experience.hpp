#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "graftrl/core_math.hpp"

namespace graftrl {

class Rng;

enum class Provenance : std::uint8_t { Authentic, Synthetic };

// One environment interaction step. `terminal` marks a genuine terminal next
// state; time-limit truncation leaves it false so value targets keep
// bootstrapping.
struct Transition {
    StateVec s;
    ActionVec a;
    double r = 0.0;
    StateVec s_next;
    Provenance provenance = Provenance::Authentic;
    bool terminal = false;
};

// Field-for-field equality of the experience content (s, a, r, s_next,
// terminal); provenance is deliberately ignored.
bool same_experience(const Transition& x, const Transition& y);

// Non-empty ordered run of transitions.
using Segment = std::vector<Transition>;

// A segment spanning a full episode. `is_complete_episode` is set when the
// last transition reached a genuine terminal state (not a time limit).
struct Trajectory {
    Segment transitions;
    bool is_complete_episode = false;
};

// Undiscounted reward sum of a segment. Throws on an empty segment.
double quality(const Segment& seg);

// Bounded FIFO transition store with uniform sampling and provenance
// accounting. Sampling is refused until the store holds `warmup` transitions.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t warmup);

    // Appends; evicts the oldest transition when full.
    void push(const Transition& t);

    // n transitions drawn uniformly with replacement. Returns nullopt while
    // below warmup (the caller skips its update).
    std::optional<std::vector<Transition>> sample_minibatch(std::size_t n, Rng& rng) const;

    // Drops every synthetic transition, keeping authentic order. Returns the
    // number removed.
    std::size_t remove_synthetic();

    // Fraction of synthetic transitions; 0 for an empty buffer.
    double synthetic_ratio() const;

    std::size_t size() const { return store_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t warmup() const { return warmup_; }
    std::size_t synthetic_count() const { return synthetic_count_; }
    bool ready() const { return store_.size() >= warmup_; }
    const Transition& at(std::size_t i) const { return store_[i]; }

private:
    std::size_t capacity_;
    std::size_t warmup_;
    std::size_t synthetic_count_ = 0;
    std::deque<Transition> store_;
};

// One row per transition: episode_id,step,s,a,r,s_next,provenance.
// Vector components are ';'-separated inside a field. episode_id and step
// are 1-based.
void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& episodes);

}  // namespace graftrl
