#include "graftrl/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graftrl {

Distribution normalize_to_distribution(const StateVec& s) {
    if (s.empty()) {
        throw std::invalid_argument("normalize_to_distribution: empty state vector");
    }
    for (double v : s) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("normalize_to_distribution: non-finite component");
        }
    }
    const double lo = *std::min_element(s.begin(), s.end());
    Distribution d;
    d.mass.resize(s.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        d.mass[i] = s[i] - lo;
        sum += d.mass[i];
    }
    if (sum == 0.0) {
        // Constant input shifts to all-zero; fall back to uniform.
        std::fill(d.mass.begin(), d.mass.end(), 1.0 / static_cast<double>(s.size()));
        return d;
    }
    for (double& m : d.mass) {
        m /= sum;
    }
    return d;
}

namespace {

void check_distribution(const Distribution& p, const char* who) {
    if (p.mass.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty distribution");
    }
    double sum = 0.0;
    for (double m : p.mass) {
        if (!(m >= 0.0)) {
            throw std::invalid_argument(std::string(who) + ": negative or non-finite mass");
        }
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string(who) + ": mass does not sum to 1");
    }
}

}  // namespace

double wasserstein1(const Distribution& p, const Distribution& q) {
    if (p.mass.size() != q.mass.size()) {
        throw std::invalid_argument("wasserstein1: support size mismatch");
    }
    check_distribution(p, "wasserstein1");
    check_distribution(q, "wasserstein1");
    double cum_p = 0.0;
    double cum_q = 0.0;
    double w = 0.0;
    for (std::size_t k = 0; k < p.mass.size(); ++k) {
        cum_p += p.mass[k];
        cum_q += q.mass[k];
        w += std::abs(cum_p - cum_q);
    }
    return w;
}

double state_distance(const StateVec& a, const StateVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("state_distance: dimension mismatch");
    }
    return wasserstein1(normalize_to_distribution(a), normalize_to_distribution(b));
}

}  // namespace graftrl
