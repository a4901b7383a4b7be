#pragma once

#include <cstdint>
#include <vector>

#include "reinforce_dyn/flow.hpp"
#include "reinforce_dyn/model.hpp"

namespace reinforce_dyn {

struct Equilibrium {
    OccupationPoint point;
    double residual;  // ||F||_inf re-evaluated at the returned point
    StabilityReport stability;
    int basin_hits;  // number of solver starts that landed here
};

struct ConditionReport {
    // Sufficient conditions from the analysis of the equal-strength family
    // and of weak interaction.  c1/c2 are false for models not of the
    // equal-strength shape; c3 applies to any model.
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    // 4 minus the largest (over walks) total interaction weight
    // sum_u sum_{j != i} |alpha_u^{ij}|; positive iff that part of c3 holds.
    double c3_margin = 0.0;
    // strict row diagonal dominance of the Jacobian at 100 sampled points
    bool dominance_ok = false;
};

// Hybrid solver: damped fixed-point iteration x <- x/2 + pi(x)/2 down to
// residual sqrt(tol), then Newton steps on the full-space Jacobian, each
// clipped to the domain; a singular or non-improving Newton step falls back
// to a fixed-point step.  Throws NoConvergence when max_iter is exhausted.
Equilibrium solve_from(const InteractionModel& model, const OccupationPoint& x0,
                       int max_iter = 20000, double tol = 1e-12);

// Multistart over the barycenter plus n_starts - 1 flat-Dirichlet points,
// deduplicated at dedup_tol in the sup norm.  Results are sorted by residual
// then lexicographically.  Throws NoConvergence only if every start fails.
std::vector<Equilibrium> find_all(const InteractionModel& model, int n_starts,
                                  std::uint64_t seed, double dedup_tol = 1e-6,
                                  int max_iter = 20000, double tol = 1e-12);

ConditionReport check_conditions(const InteractionModel& model);

// Root in (0, 1/2) of t = 1/(1 + exp(beta(1-2t))), by bisection on
// [1e-16, 1/2 - 1e-12] to width 1e-13.  Exists for beta > 2 (pitchfork);
// throws OutOfRange for beta <= 2 or when the bracket cannot see the root.
double a_of_beta(double beta);

// Same scalar root; named for its role as the off-half coordinate of the
// three-walk equilibria.  Throws NoSmallRoot when no root exists in the
// bracket (beta <= 2).
double w_of_beta(double beta);

// Whether w_of_beta(beta) lies in the interval (0, 1/beta^3).
bool w_within_cubed_bound(double beta);

// The six three-walk equilibria with coordinates {1/2, w, 1-w}: every
// assignment of those values to the three walks' vertex-1 coordinates.
// Each returned point is verified to satisfy ||F||_inf < 1e-9.
std::vector<OccupationPoint> build_S(double beta);

// Smallest grid value for which w_beta falls inside (0, 1/beta^3) and all
// six build_S points classify LinearlyStable.  The grid must be strictly
// increasing with every entry > 2 (OutOfRange otherwise); throws
// NotFoundOnGrid when no grid point qualifies.
double probe_beta0(const std::vector<double>& beta_grid);

}  // namespace reinforce_dyn
