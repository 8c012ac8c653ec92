#include "graftrl/fixtures.hpp"

#include "graftrl/rng.hpp"

namespace graftrl {

namespace {

Transition make_step(StateVec s, ActionVec a, double r, StateVec s_next, bool terminal = false) {
    Transition t;
    t.s = std::move(s);
    t.a = std::move(a);
    t.r = r;
    t.s_next = std::move(s_next);
    t.provenance = Provenance::Authentic;
    t.terminal = terminal;
    return t;
}

}  // namespace

SpliceDemo make_splice_demo() {
    SpliceDemo demo;

    // Fast walker, falls at the end: five productive steps, then the tilt
    // blows past the limit. Total reward 1.0.
    demo.fall_trial.transitions = {
        make_step({0.00, 0.00, 0.00}, {1.0, 0.0}, 2.0, {0.20, 2.00, 0.01}),
        make_step({0.20, 2.00, 0.01}, {1.0, 0.0}, 2.0, {0.40, 2.00, 0.02}),
        make_step({0.40, 2.00, 0.02}, {1.0, 0.0}, 2.0, {0.60, 2.00, 0.03}),
        make_step({0.60, 2.00, 0.03}, {1.0, 0.0}, 2.0, {1.20, 2.00, 0.04}),
        make_step({1.20, 2.00, 0.04}, {1.0, 1.0}, 2.0, {1.40, 2.00, 0.90}),
        make_step({1.40, 2.00, 0.90}, {1.0, 1.0}, -9.0, {1.60, 2.00, 1.10}, true),
    };
    demo.fall_trial.is_complete_episode = true;

    // Slow starter with a strong finish. Total reward 6.7; the tail from
    // index 3 on is worth 6.0 and starts right next to the fall trial's
    // post-state at position 3.
    demo.slow_trial.transitions = {
        make_step({0.00, 0.00, 0.00}, {0.1, 0.0}, 0.1, {0.01, 0.10, 0.00}),
        make_step({0.01, 0.10, 0.00}, {0.1, 0.0}, 0.1, {0.03, 0.20, 0.01}),
        make_step({0.03, 0.20, 0.01}, {1.0, 0.0}, 0.5, {1.20, 2.00, 0.05}),
        make_step({1.20, 2.00, 0.05}, {1.0, -0.2}, 2.0, {1.40, 2.00, 0.04}),
        make_step({1.40, 2.00, 0.04}, {1.0, -0.2}, 2.0, {1.60, 2.00, 0.03}),
        make_step({1.60, 2.00, 0.03}, {1.0, -0.2}, 2.0, {1.80, 2.00, 0.02}),
    };
    demo.slow_trial.is_complete_episode = false;
    demo.tail_start = 3;
    demo.junction_q = 3;

    // Tight threshold: the intended junction sits well inside it, every
    // other same-bin state sits well outside.
    demo.config.eps = 0.005;
    demo.config.n_ext = 0;  // the library is seeded explicitly
    demo.config.n_gft = 24;
    demo.config.theta = 5;
    demo.seed = 2026;
    return demo;
}

std::vector<SyntheticTrajectory> run_splice_demo(const SpliceDemo& demo, SegmentLibrary& lib,
                                                 GraftStats* stats) {
    const Segment tail(demo.slow_trial.transitions.begin() +
                           static_cast<std::ptrdiff_t>(demo.tail_start),
                       demo.slow_trial.transitions.end());
    lib.insert(tail.front().s, tail);
    Rng rng(demo.seed);
    return graft(demo.config, demo.fall_trial, lib, rng, stats);
}

}  // namespace graftrl
