#pragma once

#include <vector>

#include <Eigen/Dense>

#include "reinforce_dyn/errors.hpp"

// Core state types and pointwise operations for m interacting reinforced walks
// on the complete graph K_d.
//
// Index conventions, used identically across the whole library:
//   * a point of the product simplex is stored flat, coordinate (walk i, vertex v)
//     at position i*d + v, with 0-based i < m and v < d;
//   * the interaction tensor alpha_v^{ij} is stored flat at (v*m + i)*m + j.
// Matrices (Jacobian, Gamma) use the same (i,v) -> i*d + v row/column order.

namespace reinforce_dyn {

class InteractionModel {
public:
    // Throws BadDimension unless m >= 1, d >= 2 and alpha has d*m*m finite
    // entries.  Throws AsymmetricAlpha when alpha_v^{ij} != alpha_v^{ji} for
    // some v, unless allow_asymmetric is set; an asymmetric model carries no
    // Lyapunov function, so every operation that needs one refuses it.
    InteractionModel(int m, int d, std::vector<double> alpha,
                     bool allow_asymmetric = false);

    int num_walks() const { return m_; }
    int num_vertices() const { return d_; }
    double alpha(int v, int i, int j) const {
        return alpha_[(static_cast<std::size_t>(v) * m_ + i) * m_ + j];
    }
    const std::vector<double>& alpha_flat() const { return alpha_; }
    bool lyapunov_available() const { return symmetric_; }

private:
    int m_;
    int d_;
    std::vector<double> alpha_;
    bool symmetric_;
};

InteractionModel make_model(int m, int d, std::vector<double> alpha,
                            bool allow_asymmetric = false);

// A point of the product of m copies of the (d-1)-simplex: entries >= 0 and
// each walk's block sums to 1 within 1e-12.  Construction validates.
class OccupationPoint {
public:
    OccupationPoint(int m, int d, std::vector<double> flat);

    static OccupationPoint uniform(int m, int d);

    int num_walks() const { return m_; }
    int num_vertices() const { return d_; }
    double operator()(int i, int v) const { return flat_[static_cast<std::size_t>(i) * d_ + v]; }
    const std::vector<double>& flat() const { return flat_; }
    std::size_t size() const { return flat_.size(); }

private:
    int m_;
    int d_;
    std::vector<double> flat_;
};

// An element of the tangent space of the product simplex: each walk's block
// sums to 0 within 1e-12.  Construction validates.
class TangentVector {
public:
    TangentVector(int m, int d, std::vector<double> flat);

    int num_walks() const { return m_; }
    int num_vertices() const { return d_; }
    double operator()(int i, int v) const { return flat_[static_cast<std::size_t>(i) * d_ + v]; }
    const std::vector<double>& flat() const { return flat_; }
    double max_abs() const;

private:
    int m_;
    int d_;
    std::vector<double> flat_;
};

// Transition kernel pi(x): walk i moves to vertex v with probability
// proportional to exp(sum_j alpha_v^{ij} x_v^j).  Each walk's row of
// exponents is shifted by its maximum before exponentiating, so the result
// is finite for any alpha scale.  Rows are strictly positive and sum to 1.
OccupationPoint kernel_pi(const InteractionModel& model, const OccupationPoint& x);

// Mean-field vector field F(x) = -x + pi(x), tangent to the product simplex.
TangentVector field_F(const InteractionModel& model, const OccupationPoint& x);

// Jacobian of F at x, an (m*d) x (m*d) matrix in the flat index order:
//   dF_v^i/dx_u^j = -delta_{ (i,v),(j,u) }
//                   + pi_v^i(x) * (alpha_v^{ij} delta_{uv} - alpha_u^{ij} pi_u^i(x)).
Eigen::MatrixXd jacobian_F(const InteractionModel& model, const OccupationPoint& x);

// Lyapunov function
//   L(x) = sum_{i,v} x_v^i log x_v^i - (1/2) sum_{i,j,v} alpha_v^{ij} x_v^i x_v^j,
// with the 0 log 0 = 0 branch taken exactly.  Throws LyapunovUnavailable for
// an asymmetric model.
double lyapunov_L(const InteractionModel& model, const OccupationPoint& x);

// Relative entropy Ent(x/y) = sum x log(x/y), with 0 log 0 = 0.  Throws
// BoundaryReference when some y entry is 0, WrongShape on shape mismatch.
double relative_entropy(const OccupationPoint& x, const OccupationPoint& y);

// Block-diagonal rate matrix Gamma(x) = -I + Pi(x); block i has entries
// Gamma^i_{vu} = -delta_{vu} + pi_u^i(x) (row v, column u).  Every row sums
// to 0; left-multiplying by pi gives 0 and by x gives F(x).
Eigen::MatrixXd gamma_matrix(const InteractionModel& model, const OccupationPoint& x);

// Convex bracket ell(z) = z log z - z + 1 on z >= 0, with ell(0) = 1.
// Throws NegativeArgument for z < 0.
double ell(double z);

// Residual of the entropy-derivative identity at interior x: the analytic
// value of d/dt Ent(x(t)/pi) along xdot = F (reference pi frozen at x) minus
// the same quantity rewritten through ell and Gamma:
//   sum_{i,v} (log(x_v^i/pi_v^i) + 1) F_v^i
//     + sum_i sum_{u != v} ell(x_v pi_u / (x_u pi_v)) x_u (pi_v/pi_u) Gamma^i_{vu}.
// Throws BoundaryInput unless every entry of x is strictly positive.
double entropy_derivative_identity_residual(const InteractionModel& model,
                                            const OccupationPoint& x);

namespace detail {

// Raw kernels over flat arrays, shared by the integrator, solver and sampler.
// No validation; x and out have m*d entries and may not alias.
void kernel_pi_into(const InteractionModel& model, const double* x, double* out);
void field_into(const InteractionModel& model, const double* x, double* out);
void check_same_shape(const InteractionModel& model, const OccupationPoint& x);

}  // namespace detail

}  // namespace reinforce_dyn
