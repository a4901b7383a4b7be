#include "reinforce_dyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

namespace reinforce_dyn {

namespace {

constexpr double kSumTol = 1e-12;

void check_block_sums(int m, int d, const std::vector<double>& flat, double target,
                      bool require_nonnegative, const char* what) {
    if (m < 1 || d < 2)
        throw BadDimension(std::string(what) + ": need m >= 1 and d >= 2");
    if (flat.size() != static_cast<std::size_t>(m) * d)
        throw BadDimension(std::string(what) + ": expected " + std::to_string(m * d) +
                           " entries, got " + std::to_string(flat.size()));
    for (double e : flat)
        if (!std::isfinite(e))
            throw BadDimension(std::string(what) + ": non-finite entry");
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int v = 0; v < d; ++v) {
            double e = flat[static_cast<std::size_t>(i) * d + v];
            if (require_nonnegative && e < 0.0)
                throw BadDimension(std::string(what) + ": negative entry in walk " +
                                   std::to_string(i + 1));
            s += e;
        }
        if (std::abs(s - target) > kSumTol)
            throw BadDimension(std::string(what) + ": walk " + std::to_string(i + 1) +
                               " block sums to " + std::to_string(s));
    }
}

}  // namespace

InteractionModel::InteractionModel(int m, int d, std::vector<double> alpha,
                                   bool allow_asymmetric)
    : m_(m), d_(d), alpha_(std::move(alpha)) {
    if (m_ < 1 || d_ < 2)
        throw BadDimension("model: need m >= 1 and d >= 2");
    if (alpha_.size() != static_cast<std::size_t>(d_) * m_ * m_)
        throw BadDimension("model: alpha must have d*m*m = " +
                           std::to_string(static_cast<std::size_t>(d_) * m_ * m_) +
                           " entries, got " + std::to_string(alpha_.size()));
    for (double a : alpha_)
        if (!std::isfinite(a))
            throw BadDimension("model: non-finite alpha entry");
    symmetric_ = true;
    for (int v = 0; v < d_; ++v)
        for (int i = 0; i < m_; ++i)
            for (int j = i + 1; j < m_; ++j)
                if (this->alpha(v, i, j) != this->alpha(v, j, i)) {
                    symmetric_ = false;
                    if (!allow_asymmetric)
                        throw AsymmetricAlpha(
                            "model: alpha_" + std::to_string(v + 1) + "^{" +
                            std::to_string(i + 1) + std::to_string(j + 1) +
                            "} != its transpose; pass allow_asymmetric to accept");
                }
}

InteractionModel make_model(int m, int d, std::vector<double> alpha,
                            bool allow_asymmetric) {
    return InteractionModel(m, d, std::move(alpha), allow_asymmetric);
}

OccupationPoint::OccupationPoint(int m, int d, std::vector<double> flat)
    : m_(m), d_(d), flat_(std::move(flat)) {
    check_block_sums(m_, d_, flat_, 1.0, /*require_nonnegative=*/true, "occupation point");
}

OccupationPoint OccupationPoint::uniform(int m, int d) {
    if (m < 1 || d < 2)
        throw BadDimension("uniform point: need m >= 1 and d >= 2");
    return OccupationPoint(m, d, std::vector<double>(static_cast<std::size_t>(m) * d, 1.0 / d));
}

TangentVector::TangentVector(int m, int d, std::vector<double> flat)
    : m_(m), d_(d), flat_(std::move(flat)) {
    check_block_sums(m_, d_, flat_, 0.0, /*require_nonnegative=*/false, "tangent vector");
}

double TangentVector::max_abs() const {
    double r = 0.0;
    for (double e : flat_) r = std::max(r, std::abs(e));
    return r;
}

namespace detail {

void check_same_shape(const InteractionModel& model, const OccupationPoint& x) {
    if (model.num_walks() != x.num_walks() || model.num_vertices() != x.num_vertices())
        throw WrongShape("point shape (" + std::to_string(x.num_walks()) + "," +
                         std::to_string(x.num_vertices()) + ") does not match model (" +
                         std::to_string(model.num_walks()) + "," +
                         std::to_string(model.num_vertices()) + ")");
}

void kernel_pi_into(const InteractionModel& model, const double* x, double* out) {
    const int m = model.num_walks();
    const int d = model.num_vertices();
    for (int i = 0; i < m; ++i) {
        double* row = out + static_cast<std::size_t>(i) * d;
        double gmax = -std::numeric_limits<double>::infinity();
        for (int v = 0; v < d; ++v) {
            double g = 0.0;
            for (int j = 0; j < m; ++j)
                g += model.alpha(v, i, j) * x[static_cast<std::size_t>(j) * d + v];
            row[v] = g;
            gmax = std::max(gmax, g);
        }
        double z = 0.0;
        for (int v = 0; v < d; ++v) {
            row[v] = std::exp(row[v] - gmax);
            z += row[v];
        }
        for (int v = 0; v < d; ++v) row[v] /= z;
    }
}

void field_into(const InteractionModel& model, const double* x, double* out) {
    kernel_pi_into(model, x, out);
    const std::size_t n = static_cast<std::size_t>(model.num_walks()) * model.num_vertices();
    for (std::size_t k = 0; k < n; ++k) out[k] -= x[k];
}

}  // namespace detail

OccupationPoint kernel_pi(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    std::vector<double> out(x.size());
    detail::kernel_pi_into(model, x.flat().data(), out.data());
    return OccupationPoint(x.num_walks(), x.num_vertices(), std::move(out));
}

TangentVector field_F(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    std::vector<double> out(x.size());
    detail::field_into(model, x.flat().data(), out.data());
    return TangentVector(x.num_walks(), x.num_vertices(), std::move(out));
}

Eigen::MatrixXd jacobian_F(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    const int m = model.num_walks();
    const int d = model.num_vertices();
    std::vector<double> pi(x.size());
    detail::kernel_pi_into(model, x.flat().data(), pi.data());
    Eigen::MatrixXd jac(m * d, m * d);
    for (int i = 0; i < m; ++i)
        for (int v = 0; v < d; ++v) {
            const int row = i * d + v;
            const double piv = pi[static_cast<std::size_t>(i) * d + v];
            for (int j = 0; j < m; ++j)
                for (int u = 0; u < d; ++u) {
                    const int col = j * d + u;
                    double e = piv * ((u == v ? model.alpha(v, i, j) : 0.0) -
                                      model.alpha(u, i, j) * pi[static_cast<std::size_t>(i) * d + u]);
                    if (row == col) e -= 1.0;
                    jac(row, col) = e;
                }
        }
    return jac;
}

namespace {

double xlogx(double v) {
    return v == 0.0 ? 0.0 : v * std::log(v);
}

}  // namespace

double lyapunov_L(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    if (!model.lyapunov_available())
        throw LyapunovUnavailable("lyapunov_L: model has asymmetric alpha");
    const int m = model.num_walks();
    const int d = model.num_vertices();
    double entropy = 0.0;
    for (double e : x.flat()) entropy += xlogx(e);
    double quad = 0.0;
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                quad += model.alpha(v, i, j) * x(i, v) * x(j, v);
    return entropy - 0.5 * quad;
}

double relative_entropy(const OccupationPoint& x, const OccupationPoint& y) {
    if (x.num_walks() != y.num_walks() || x.num_vertices() != y.num_vertices())
        throw WrongShape("relative_entropy: mismatched shapes");
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xv = x.flat()[k];
        const double yv = y.flat()[k];
        if (yv == 0.0)
            throw BoundaryReference("relative_entropy: reference point has a zero entry");
        if (xv != 0.0) s += xv * std::log(xv / yv);
    }
    return s;
}

Eigen::MatrixXd gamma_matrix(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    const int m = model.num_walks();
    const int d = model.num_vertices();
    std::vector<double> pi(x.size());
    detail::kernel_pi_into(model, x.flat().data(), pi.data());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m * d, m * d);
    for (int i = 0; i < m; ++i)
        for (int v = 0; v < d; ++v)
            for (int u = 0; u < d; ++u)
                g(i * d + v, i * d + u) =
                    pi[static_cast<std::size_t>(i) * d + u] - (u == v ? 1.0 : 0.0);
    return g;
}

double ell(double z) {
    if (z < 0.0)
        throw NegativeArgument("ell: argument must be >= 0");
    if (z == 0.0) return 1.0;
    return z * std::log(z) - z + 1.0;
}

double entropy_derivative_identity_residual(const InteractionModel& model,
                                            const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    for (double e : x.flat())
        if (e <= 0.0)
            throw BoundaryInput("entropy derivative identity: x must be strictly interior");
    const int m = model.num_walks();
    const int d = model.num_vertices();
    std::vector<double> pi(x.size());
    detail::kernel_pi_into(model, x.flat().data(), pi.data());

    double lhs = 0.0;
    for (int i = 0; i < m; ++i)
        for (int v = 0; v < d; ++v) {
            const double xv = x(i, v);
            const double pv = pi[static_cast<std::size_t>(i) * d + v];
            lhs += (std::log(xv / pv) + 1.0) * (pv - xv);
        }

    // Gamma^i_{vu} = pi_u^i for u != v, so the double sum needs no matrix.
    double rhs = 0.0;
    for (int i = 0; i < m; ++i)
        for (int v = 0; v < d; ++v)
            for (int u = 0; u < d; ++u) {
                if (u == v) continue;
                const double xv = x(i, v), xu = x(i, u);
                const double pv = pi[static_cast<std::size_t>(i) * d + v];
                const double pu = pi[static_cast<std::size_t>(i) * d + u];
                rhs -= ell(xv * pu / (xu * pv)) * xu * (pv / pu) * pu;
            }

    return std::abs(lhs - rhs);
}

}  // namespace reinforce_dyn
