#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "reinforce_dyn/model.hpp"
#include "reinforce_dyn/rng.hpp"

namespace reinforce_dyn {

// State of the m-walk reinforced process after n completed steps.  counts
// holds 1 + (number of visits) per (walk, vertex) in the usual flat order, so
// each walk's block sums to d + n and occupation() = counts / (d + n).
struct WalkState {
    int m = 0;
    int d = 0;
    long long n = 0;
    std::vector<long long> counts;
    std::vector<int> positions;  // current vertex per walk, -1 before step 1
    double tau = 0.0;            // sum of gamma_k over completed steps
    SplitMix64 rng{0};

    // Step size of the stochastic-approximation rewrite at the current n.
    double gamma() const { return 1.0 / static_cast<double>(n + d + 1); }
    OccupationPoint occupation() const;
};

WalkState init_walks(const InteractionModel& model, std::uint64_t seed);

// One synchronous step: every walk samples its next vertex from the kernel
// at the current occupation (one uniform draw per walk, walk order fixed,
// inverse-CDF with the last vertex absorbing rounding).  The increment obeys
//   X(n+1) - X(n) = gamma_n (F(X(n)) + U_n),   U_n = xi(n) - pi(X(n)),
// exactly; step_audited returns that decomposition with its floating-point
// reconstruction residual.
void step(const InteractionModel& model, WalkState& state);

struct SaAudit {
    double gamma_n = 0.0;
    std::vector<int> xi;        // vertex chosen by each walk
    std::vector<double> u_n;    // noise tensor xi - pi, flat
    double reconstruction_residual = 0.0;
};

SaAudit step_audited(const InteractionModel& model, WalkState& state);

struct RunResult {
    WalkState final_state;
    std::vector<long long> sample_steps;
    std::vector<double> sample_tau;
    std::vector<std::vector<double>> sample_points;  // occupation, flat per sample
    // Martingale M_n = sum_k gamma_k U_k of the decomposition:
    std::vector<double> martingale_final;
    double martingale_max_norm = 0.0;                // running max of ||M_n||_inf
    // (n, ||M_2n - M_n||_inf) along dyadic times; convergence of M shows up
    // as these increments dying out.
    std::vector<std::pair<long long, double>> dyadic_increments;
};

// Runs n_steps steps from the fresh state, recording every record_stride-th
// occupation (0 picks a stride giving ~1000 samples).  The initial and final
// states are always recorded.
RunResult run(const InteractionModel& model, std::uint64_t seed, long long n_steps,
              long long record_stride = 0);

// Noise floor of the decomposition at interior x:
//   s(x) = (1/(2 m d)) (min_{i,v} pi_v^i(x))^{m+1},
// a lower bound for E[<theta, U>^+] over unit-l1 tangent directions theta.
double noise_bound_s(const InteractionModel& model, const OccupationPoint& x);

// Three walks on K_2 seen through their displacement coordinates
// S^i_n = s0^i + (right moves) - (left moves); vertex index 1 is "right".
// The identity S^i_n - S^i_0 = 2 (counts[i][1] - 1) - n holds exactly.
struct ZWalkState {
    std::array<long long, 3> s{};
    std::array<long long, 3> s0{};
    WalkState inner;
};

struct ZRunResult {
    RunResult base;
    ZWalkState final_state;
    // S values at the recorded sample steps (aligned with base.sample_steps)
    std::vector<std::array<long long, 3>> z_path;
    // fraction of right moves per walk over the trailing 10% of the run
    std::array<double, 3> empirical_step_probs{};
};

ZRunResult run_z_walks(double beta, std::uint64_t seed, long long n_steps,
                       std::array<long long, 3> s0, long long record_stride = 0);

}  // namespace reinforce_dyn
