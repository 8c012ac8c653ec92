#pragma once

#include <vector>

namespace graftrl {

using StateVec = std::vector<double>;
using ActionVec = std::vector<double>;

// Probability mass over the integer support 0..n-1 with unit spacing.
struct Distribution {
    std::vector<double> mass;
};

// Maps a state vector to a distribution: shift so the minimum is zero, then
// L1-normalize. A constant vector maps to the uniform distribution. The map
// is scale- and shift-invariant, so distinct states may collide.
Distribution normalize_to_distribution(const StateVec& s);

// 1-Wasserstein (earth mover's) distance between two distributions on the
// same ordered unit-spaced support: the L1 distance of their cumulative sums.
double wasserstein1(const Distribution& p, const Distribution& q);

// Distance between two states of equal dimension: W1 of their normalized
// distributional representations. A pseudo-metric on states.
double state_distance(const StateVec& a, const StateVec& b);

}  // namespace graftrl
