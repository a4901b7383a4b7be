#pragma once

#include "reinforce_dyn/model.hpp"

namespace reinforce_dyn {

// Equal-strength repelling family: alpha_v^{ij} = -beta for i != j, 0 on the
// diagonal, the same at every vertex.  beta > 0 repels, beta < 0 attracts.
inline InteractionModel equal_beta_repelling(int m, int d, double beta) {
    if (m < 1 || d < 2)
        throw BadDimension("equal_beta_repelling: need m >= 1 and d >= 2");
    std::vector<double> alpha(static_cast<std::size_t>(d) * m * m, 0.0);
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j)
                    alpha[(static_cast<std::size_t>(v) * m + i) * m + j] = -beta;
    return InteractionModel(m, d, std::move(alpha));
}

// Two repelling walks on K_2; pitchfork at beta = 2.
inline InteractionModel two_walk_k2(double beta) { return equal_beta_repelling(2, 2, beta); }

// Three repelling walks on K_2, the setting of the Z-walk reduction.
inline InteractionModel three_walk_z(double beta) { return equal_beta_repelling(3, 2, beta); }

}  // namespace reinforce_dyn
