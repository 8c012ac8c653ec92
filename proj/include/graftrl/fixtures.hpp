#pragma once

#include <cstdint>

#include "graftrl/grafting.hpp"

namespace graftrl {

// Hand-built two-trial walker scenario. The fall trial moves fast and tips
// over at the end (low total reward); the slow trial creeps at first but
// finishes strong (medium total reward). The two trials pass through nearly
// identical mid states, so grafting the fast head onto the strong tail
// yields exactly one synthetic trajectory that outperforms both inputs.
struct SpliceDemo {
    Trajectory fall_trial;
    Trajectory slow_trial;
    std::size_t tail_start = 0;   // index in slow_trial where the strong tail begins
    std::size_t junction_q = 0;   // position in fall_trial whose post-state matches the key
    GraftConfig config;
    std::uint64_t seed = 0;
};

SpliceDemo make_splice_demo();

// Seeds the library with the slow trial's tail and grafts the fall trial.
std::vector<SyntheticTrajectory> run_splice_demo(const SpliceDemo& demo, SegmentLibrary& lib,
                                                 GraftStats* stats = nullptr);

}  // namespace graftrl
