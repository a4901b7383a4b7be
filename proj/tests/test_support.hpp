#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "reinforce_dyn/model.hpp"
#include "reinforce_dyn/rng.hpp"

namespace test_support {

using reinforce_dyn::InteractionModel;
using reinforce_dyn::OccupationPoint;
using reinforce_dyn::SplitMix64;

inline double uniform_in(SplitMix64& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_uniform();
}

// Random model with alpha_v^{ij} = alpha_v^{ji} drawn uniformly in [-amp, amp];
// with_diagonal=false zeroes the self-interaction entries.
inline InteractionModel random_symmetric_model(SplitMix64& rng, int m, int d, double amp,
                                               bool with_diagonal = true) {
    std::vector<double> alpha(static_cast<std::size_t>(d) * m * m, 0.0);
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                if (i == j && !with_diagonal) continue;
                const double a = uniform_in(rng, -amp, amp);
                alpha[(static_cast<std::size_t>(v) * m + i) * m + j] = a;
                alpha[(static_cast<std::size_t>(v) * m + j) * m + i] = a;
            }
    return InteractionModel(m, d, std::move(alpha));
}

inline OccupationPoint random_interior(SplitMix64& rng, int m, int d) {
    return OccupationPoint(m, d, reinforce_dyn::dirichlet_point(rng, m, d));
}

inline double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
    return r;
}

// Zero-diagonal symmetric model rescaled so the worst interaction weight
// max_i sum_u sum_{j != i} |alpha_u^{ij}| lands strictly inside (0, 4).
inline InteractionModel random_c3_model(SplitMix64& rng, int m, int d) {
    std::vector<double> alpha(static_cast<std::size_t>(d) * m * m, 0.0);
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double a = uniform_in(rng, -1.0, 1.0);
                alpha[(static_cast<std::size_t>(v) * m + i) * m + j] = a;
                alpha[(static_cast<std::size_t>(v) * m + j) * m + i] = a;
            }
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        double weight = 0.0;
        for (int v = 0; v < d; ++v)
            for (int j = 0; j < m; ++j)
                if (j != i) weight += std::abs(alpha[(static_cast<std::size_t>(v) * m + i) * m + j]);
        worst = std::max(worst, weight);
    }
    const double target = uniform_in(rng, 0.4, 3.6);
    if (worst > 0.0)
        for (double& a : alpha) a *= target / worst;
    return InteractionModel(m, d, std::move(alpha));
}

}  // namespace test_support
