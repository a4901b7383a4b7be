#pragma once

#include <complex>
#include <string>
#include <vector>

#include "reinforce_dyn/model.hpp"

namespace reinforce_dyn {

struct Trajectory {
    std::vector<double> times;
    std::vector<OccupationPoint> points;
    // Lyapunov value at each recorded point; empty when the model carries no
    // Lyapunov function.
    std::vector<double> lyapunov;
    // Most negative coordinate produced by any RK4 step before clipping;
    // stays within integrator drift (tiny) of 0 for well-behaved runs.
    double min_entry_before_renorm = 0.0;
};

// Classical fixed-step RK4 for xdot = F(x).  dt above 0.01 throws
// StepTooLarge; the step count is ceil(t_end/dt) with the step width adjusted
// so the final time is exactly t_end.  After each step negative entries are
// clipped to 0 and each walk's block renormalized to sum 1.  Every
// record_every-th point (plus the initial and final ones) is recorded.
// Throws NonFiniteState if the state leaves IEEE-finite range.
Trajectory integrate(const InteractionModel& model, const OccupationPoint& x0,
                     double dt, double t_end, int record_every = 1);

struct MonotoneReport {
    long violations = 0;
    double max_increase = 0.0;  // largest recorded L difference, any sign
};

// Scans consecutive recorded Lyapunov values; an increase beyond slack counts
// as a violation.  Throws LyapunovUnavailable when the trajectory carries no
// Lyapunov samples.
MonotoneReport lyapunov_monotone_check(const InteractionModel& model,
                                       const Trajectory& trajectory,
                                       double slack = 1e-9);

enum class Stability { LinearlyStable, LinearlyUnstable, NonHyperbolic };

std::string to_string(Stability s);

struct StabilityReport {
    // Full spectrum of the Jacobian, all m*d eigenvalues.  The m directions
    // transverse to the product simplex always contribute eigenvalue -1.
    std::vector<std::complex<double>> eigenvalues;
    Stability classification = Stability::NonHyperbolic;
    // min |Re(lambda)| over the spectrum of the Jacobian restricted to the
    // tangent space of the product simplex (the part that decides stability
    // of the constrained flow).
    double hyperbolic_margin = 0.0;
};

// Linearizes F at x_star (which must satisfy ||F||_inf < 1e-8, else
// NotAnEquilibrium) and classifies by the signs of the real parts:
// all < -margin_tol -> LinearlyStable; some |Re| <= margin_tol ->
// NonHyperbolic; otherwise LinearlyUnstable.
StabilityReport classify(const InteractionModel& model, const OccupationPoint& x_star,
                         double margin_tol = 1e-7);

// Spectrum of the Jacobian restricted to the tangent space, m*(d-1) values.
std::vector<std::complex<double>> tangent_spectrum(const InteractionModel& model,
                                                   const OccupationPoint& x);

// For the three-walk repelling family on K_2: evaluates the closed-form
// squared characteristic polynomial in the vertex-1 coordinates
// (a, b, c) = (x_1^1, x_1^2, x_1^3).  With A = -2 beta a(1-a), B and C
// likewise,
//   p_x(l) = (AB + AC + 2ABC + AB l + AC l - (1+l)(-BC + (1+l)^2))^2
// is evaluated at each of the three eigenvalues of the
// Jacobian restricted to the tangent space, and returns the largest
// absolute value.  (The remaining three eigenvalues sit at -1 transverse to
// the simplex and are not roots of p_x.)  Throws WrongShape unless the point
// has m = 3, d = 2.
double characteristic_poly_check_3walk(double beta, const OccupationPoint& equilibrium);

}  // namespace reinforce_dyn
