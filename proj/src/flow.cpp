#include "reinforce_dyn/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "reinforce_dyn/presets.hpp"

namespace reinforce_dyn {

namespace {

// One RK4 step of width h on the flat state, using scratch arrays owned by
// the caller.  Returns the most negative entry of the raw result, then clips
// and renormalizes in place.
double rk4_step(const InteractionModel& model, std::vector<double>& x, double h,
                std::vector<double>& k1, std::vector<double>& k2,
                std::vector<double>& k3, std::vector<double>& k4,
                std::vector<double>& tmp) {
    const std::size_t n = x.size();
    detail::field_into(model, x.data(), k1.data());
    for (std::size_t s = 0; s < n; ++s) tmp[s] = x[s] + 0.5 * h * k1[s];
    detail::field_into(model, tmp.data(), k2.data());
    for (std::size_t s = 0; s < n; ++s) tmp[s] = x[s] + 0.5 * h * k2[s];
    detail::field_into(model, tmp.data(), k3.data());
    for (std::size_t s = 0; s < n; ++s) tmp[s] = x[s] + h * k3[s];
    detail::field_into(model, tmp.data(), k4.data());
    double min_entry = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        x[s] += (h / 6.0) * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
        min_entry = std::min(min_entry, x[s]);
    }
    const int d = model.num_vertices();
    for (int i = 0; i < model.num_walks(); ++i) {
        double* block = x.data() + static_cast<std::size_t>(i) * d;
        double sum = 0.0;
        for (int v = 0; v < d; ++v) {
            if (block[v] < 0.0) block[v] = 0.0;
            sum += block[v];
        }
        for (int v = 0; v < d; ++v) block[v] /= sum;
    }
    return min_entry;
}

// Block-diagonal orthonormal basis of the tangent space: per walk, the last
// d-1 columns of the Householder reflection sending ones/sqrt(d) to e_1.
Eigen::MatrixXd tangent_basis(int m, int d) {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    u(0) -= 1.0;
    u.normalize();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) - 2.0 * u * u.transpose();
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m * d, m * (d - 1));
    for (int i = 0; i < m; ++i)
        basis.block(i * d, i * (d - 1), d, d - 1) = h.rightCols(d - 1);
    return basis;
}

}  // namespace

Trajectory integrate(const InteractionModel& model, const OccupationPoint& x0,
                     double dt, double t_end, int record_every) {
    detail::check_same_shape(model, x0);
    if (!(dt > 0.0) || !(t_end > 0.0) || record_every < 1)
        throw BadDimension("integrate: need dt > 0, t_end > 0, record_every >= 1");
    if (dt > 0.01)
        throw StepTooLarge("integrate: dt must be <= 0.01");
    const long n_steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / static_cast<double>(n_steps);

    const int m = model.num_walks();
    const int d = model.num_vertices();
    const std::size_t n = x0.size();
    std::vector<double> x = x0.flat();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    Trajectory traj;
    const bool track_l = model.lyapunov_available();
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.points.emplace_back(m, d, x);
        if (track_l) traj.lyapunov.push_back(lyapunov_L(model, traj.points.back()));
    };
    record(0.0);
    for (long k = 1; k <= n_steps; ++k) {
        const double dip = rk4_step(model, x, h, k1, k2, k3, k4, tmp);
        traj.min_entry_before_renorm = std::min(traj.min_entry_before_renorm, dip);
        for (double e : x)
            if (!std::isfinite(e))
                throw NonFiniteState("integrate: state left finite range at step " +
                                     std::to_string(k));
        if (k % record_every == 0 || k == n_steps) record(h * static_cast<double>(k));
    }
    return traj;
}

MonotoneReport lyapunov_monotone_check(const InteractionModel& model,
                                       const Trajectory& trajectory, double slack) {
    if (!model.lyapunov_available() || trajectory.lyapunov.empty())
        throw LyapunovUnavailable("lyapunov_monotone_check: no Lyapunov samples");
    MonotoneReport report;
    report.max_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < trajectory.lyapunov.size(); ++k) {
        const double diff = trajectory.lyapunov[k + 1] - trajectory.lyapunov[k];
        report.max_increase = std::max(report.max_increase, diff);
        if (diff > slack) ++report.violations;
    }
    if (trajectory.lyapunov.size() < 2) report.max_increase = 0.0;
    return report;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::LinearlyStable: return "LinearlyStable";
        case Stability::LinearlyUnstable: return "LinearlyUnstable";
        default: return "NonHyperbolic";
    }
}

std::vector<std::complex<double>> tangent_spectrum(const InteractionModel& model,
                                                   const OccupationPoint& x) {
    const Eigen::MatrixXd jac = jacobian_F(model, x);
    const Eigen::MatrixXd basis = tangent_basis(model.num_walks(), model.num_vertices());
    const Eigen::MatrixXd reduced = basis.transpose() * jac * basis;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(reduced, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> eig(solver.eigenvalues().data(),
                                          solver.eigenvalues().data() + reduced.rows());
    std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return eig;
}

StabilityReport classify(const InteractionModel& model, const OccupationPoint& x_star,
                         double margin_tol) {
    if (field_F(model, x_star).max_abs() >= 1e-8)
        throw NotAnEquilibrium("classify: ||F||_inf >= 1e-8 at the given point");
    const Eigen::MatrixXd jac = jacobian_F(model, x_star);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/false);

    StabilityReport report;
    report.eigenvalues.assign(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + jac.rows());
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const auto& a, const auto& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });

    bool any_margin = false, any_positive = false;
    for (const auto& ev : report.eigenvalues) {
        if (std::abs(ev.real()) <= margin_tol) any_margin = true;
        if (ev.real() > margin_tol) any_positive = true;
    }
    report.classification = any_margin  ? Stability::NonHyperbolic
                          : any_positive ? Stability::LinearlyUnstable
                                         : Stability::LinearlyStable;

    double margin = std::numeric_limits<double>::infinity();
    for (const auto& ev : tangent_spectrum(model, x_star))
        margin = std::min(margin, std::abs(ev.real()));
    report.hyperbolic_margin = margin;
    return report;
}

double characteristic_poly_check_3walk(double beta, const OccupationPoint& equilibrium) {
    if (equilibrium.num_walks() != 3 || equilibrium.num_vertices() != 2)
        throw WrongShape("characteristic_poly_check_3walk: point must have m = 3, d = 2");
    const InteractionModel model = three_walk_z(beta);

    const double a = equilibrium(0, 0);
    const double b = equilibrium(1, 0);
    const double c = equilibrium(2, 0);
    const double ca = -2.0 * beta * a * (1.0 - a);
    const double cb = -2.0 * beta * b * (1.0 - b);
    const double cc = -2.0 * beta * c * (1.0 - c);

    double worst = 0.0;
    for (const auto& lam : tangent_spectrum(model, equilibrium)) {
        const std::complex<double> l1 = lam + 1.0;
        const std::complex<double> inner =
            ca * cb + ca * cc + 2.0 * ca * cb * cc + ca * cb * lam + ca * cc * lam -
            l1 * (-cb * cc + l1 * l1);
        worst = std::max(worst, std::abs(inner * inner));
    }
    return worst;
}

}  // namespace reinforce_dyn
