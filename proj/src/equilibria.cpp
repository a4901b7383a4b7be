#include "reinforce_dyn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/LU>

#include "reinforce_dyn/presets.hpp"
#include "reinforce_dyn/rng.hpp"

namespace reinforce_dyn {

namespace {

double residual_inf(const InteractionModel& model, const std::vector<double>& x,
                    std::vector<double>& f) {
    detail::field_into(model, x.data(), f.data());
    double r = 0.0;
    for (double e : f) r = std::max(r, std::abs(e));
    return r;
}

void clip_and_renormalize(const InteractionModel& model, std::vector<double>& x) {
    const int d = model.num_vertices();
    for (int i = 0; i < model.num_walks(); ++i) {
        double* block = x.data() + static_cast<std::size_t>(i) * d;
        double sum = 0.0;
        for (int v = 0; v < d; ++v) {
            if (!(block[v] > 0.0)) block[v] = 0.0;
            sum += block[v];
        }
        if (sum == 0.0) {
            for (int v = 0; v < d; ++v) block[v] = 1.0 / d;
        } else {
            for (int v = 0; v < d; ++v) block[v] /= sum;
        }
    }
}

// Core iteration on flat state; returns the final iterate or nothing on
// iteration exhaustion.
std::optional<std::vector<double>> solve_core(const InteractionModel& model,
                                              std::vector<double> x, int max_iter,
                                              double tol) {
    const std::size_t n = x.size();
    const double fp_target = std::sqrt(tol);
    std::vector<double> f(n), pi(n), trial(n), trial_f(n);
    int iter = 0;

    double res = residual_inf(model, x, f);
    while (res >= fp_target) {
        if (iter++ >= max_iter) return std::nullopt;
        detail::kernel_pi_into(model, x.data(), pi.data());
        for (std::size_t s = 0; s < n; ++s) x[s] = 0.5 * x[s] + 0.5 * pi[s];
        clip_and_renormalize(model, x);
        res = residual_inf(model, x, f);
    }

    while (res >= tol) {
        if (iter++ >= max_iter) return std::nullopt;
        const OccupationPoint point(model.num_walks(), model.num_vertices(), x);
        const Eigen::MatrixXd jac = jacobian_F(model, point);
        const Eigen::Map<const Eigen::VectorXd> fvec(f.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd delta = jac.partialPivLu().solve(-fvec);
        bool newton_ok = delta.allFinite();
        if (newton_ok) {
            for (std::size_t s = 0; s < n; ++s) trial[s] = x[s] + delta[static_cast<Eigen::Index>(s)];
            clip_and_renormalize(model, trial);
            const double trial_res = residual_inf(model, trial, trial_f);
            if (trial_res <= 0.9 * res || trial_res < tol) {
                x.swap(trial);
                f.swap(trial_f);
                res = trial_res;
                continue;
            }
            newton_ok = false;
        }
        if (!newton_ok) {  // singular or non-improving step: fixed-point fallback
            detail::kernel_pi_into(model, x.data(), pi.data());
            for (std::size_t s = 0; s < n; ++s) x[s] = 0.5 * x[s] + 0.5 * pi[s];
            clip_and_renormalize(model, x);
            res = residual_inf(model, x, f);
        }
    }

    // Polish. A residual below tol can still sit ~1e-4 from the root where the
    // Jacobian degenerates (the beta = 2 pitchfork flattens F to cubic order
    // along the center direction), which would leave duplicate near-roots that
    // survive deduplication. First try a multiplicity-3 Newton step: for a
    // cubic-degenerate root x + 3*delta lands within ~1e-8 of it in one step,
    // and this entry iterate has the best signal-to-noise ratio the polish will
    // ever see (plain Newton from here stalls ~5e-6 out, where F is all
    // roundoff). At a regular root the triple step overshoots and is rejected
    // by the residual test. Then take plain Newton steps until the step itself
    // is negligible; no accepted step may push the residual back above tol.
    for (int polish = 0; polish < 80; ++polish) {
        const OccupationPoint point(model.num_walks(), model.num_vertices(), x);
        const Eigen::MatrixXd jac = jacobian_F(model, point);
        const Eigen::Map<const Eigen::VectorXd> fvec(f.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd delta = jac.partialPivLu().solve(-fvec);
        if (!delta.allFinite()) break;
        if (delta.lpNorm<Eigen::Infinity>() < 1e-13) break;
        const double scale = polish == 0 ? 3.0 : 1.0;
        for (std::size_t s = 0; s < n; ++s)
            trial[s] = x[s] + scale * delta[static_cast<Eigen::Index>(s)];
        clip_and_renormalize(model, trial);
        double trial_res = residual_inf(model, trial, trial_f);
        if (polish == 0 && trial_res >= res) {  // regular root: retry untripled
            for (std::size_t s = 0; s < n; ++s)
                trial[s] = x[s] + delta[static_cast<Eigen::Index>(s)];
            clip_and_renormalize(model, trial);
            trial_res = residual_inf(model, trial, trial_f);
        }
        if (trial_res >= tol && trial_res >= res) break;
        if (trial_res > res && polish > 0) break;
        x.swap(trial);
        f.swap(trial_f);
        res = trial_res;
    }
    return x;
}

Equilibrium finish(const InteractionModel& model, std::vector<double> x) {
    OccupationPoint point(model.num_walks(), model.num_vertices(), std::move(x));
    std::vector<double> f(point.size());
    const double res = residual_inf(model, point.flat(), f);
    return Equilibrium{point, res, classify(model, point), 1};
}

// Strictly-equal off-diagonal interaction strength of the equal-strength
// family, or nothing when the model is not of that shape.
std::optional<double> equal_beta_of(const InteractionModel& model) {
    const int m = model.num_walks();
    const int d = model.num_vertices();
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            if (model.alpha(v, i, i) != 0.0) return std::nullopt;
    if (m < 2) return std::nullopt;
    const double common = model.alpha(0, 0, 1);
    for (int v = 0; v < d; ++v)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j && model.alpha(v, i, j) != common) return std::nullopt;
    return -common;
}

double bisect_small_root(double beta) {
    const auto gap = [beta](double t) {
        return t - 1.0 / (1.0 + std::exp(beta * (1.0 - 2.0 * t)));
    };
    double lo = 1e-16, hi = 0.5 - 1e-12;
    if (!(gap(lo) < 0.0) || !(gap(hi) > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Equilibrium solve_from(const InteractionModel& model, const OccupationPoint& x0,
                       int max_iter, double tol) {
    detail::check_same_shape(model, x0);
    if (max_iter < 1 || !(tol >= 1e-14))
        throw BadDimension("solve_from: need max_iter >= 1 and tol >= 1e-14");
    auto x = solve_core(model, x0.flat(), max_iter, tol);
    if (!x)
        throw NoConvergence("solve_from: residual not below tol after " +
                            std::to_string(max_iter) + " iterations");
    return finish(model, std::move(*x));
}

std::vector<Equilibrium> find_all(const InteractionModel& model, int n_starts,
                                  std::uint64_t seed, double dedup_tol, int max_iter,
                                  double tol) {
    if (n_starts < 1)
        throw BadDimension("find_all: need n_starts >= 1");
    const int m = model.num_walks();
    const int d = model.num_vertices();
    SplitMix64 rng(seed);

    struct Found {
        std::vector<double> x;
        int hits;
    };
    std::vector<Found> found;
    int failures = 0;

    for (int s = 0; s < n_starts; ++s) {
        std::vector<double> x0 = s == 0 ? std::vector<double>(static_cast<std::size_t>(m) * d, 1.0 / d)
                                        : dirichlet_point(rng, m, d);
        auto x = solve_core(model, std::move(x0), max_iter, tol);
        if (!x) {
            ++failures;
            continue;
        }
        bool merged = false;
        for (auto& g : found) {
            double dist = 0.0;
            for (std::size_t k = 0; k < x->size(); ++k)
                dist = std::max(dist, std::abs((*x)[k] - g.x[k]));
            if (dist < dedup_tol) {
                ++g.hits;
                merged = true;
                break;
            }
        }
        if (!merged) found.push_back(Found{std::move(*x), 1});
    }
    if (found.empty())
        throw NoConvergence("find_all: all " + std::to_string(n_starts) + " starts failed");

    std::vector<Equilibrium> out;
    out.reserve(found.size());
    for (auto& g : found) {
        Equilibrium eq = finish(model, std::move(g.x));
        eq.basin_hits = g.hits;
        out.push_back(std::move(eq));
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        if (a.residual != b.residual) return a.residual < b.residual;
        return a.point.flat() < b.point.flat();
    });
    return out;
}

ConditionReport check_conditions(const InteractionModel& model) {
    const int m = model.num_walks();
    const int d = model.num_vertices();
    ConditionReport report;

    const auto beta = equal_beta_of(model);
    report.c1 = beta.has_value() && d == 2 && *beta <= 2.0;
    report.c2 = beta.has_value() && d * (m - 1) * std::abs(*beta) < 4.0;

    bool diag_zero = true;
    for (int v = 0; v < d && diag_zero; ++v)
        for (int i = 0; i < m && diag_zero; ++i)
            if (model.alpha(v, i, i) != 0.0) diag_zero = false;
    double worst_weight = 0.0;
    for (int i = 0; i < m; ++i) {
        double weight = 0.0;
        for (int v = 0; v < d; ++v)
            for (int j = 0; j < m; ++j)
                if (j != i) weight += std::abs(model.alpha(v, i, j));
        worst_weight = std::max(worst_weight, weight);
    }
    report.c3_margin = 4.0 - worst_weight;
    report.c3 = diag_zero && report.c3_margin > 0.0;

    SplitMix64 rng(0x5eedULL);
    report.dominance_ok = true;
    for (int k = 0; k < 100 && report.dominance_ok; ++k) {
        const OccupationPoint x(m, d, dirichlet_point(rng, m, d));
        const Eigen::MatrixXd jac = jacobian_F(model, x);
        for (Eigen::Index r = 0; r < jac.rows() && report.dominance_ok; ++r) {
            double off = 0.0;
            for (Eigen::Index c = 0; c < jac.cols(); ++c)
                if (c != r) off += std::abs(jac(r, c));
            if (!(std::abs(jac(r, r)) > off)) report.dominance_ok = false;
        }
    }
    return report;
}

double a_of_beta(double beta) {
    if (!(beta > 2.0))
        throw OutOfRange("a_of_beta: defined for beta > 2 only");
    const double root = bisect_small_root(beta);
    if (std::isnan(root))
        throw OutOfRange("a_of_beta: bracket [1e-16, 1/2) cannot resolve the root at beta = " +
                         std::to_string(beta));
    return root;
}

double w_of_beta(double beta) {
    const double root = bisect_small_root(beta);
    if (std::isnan(root))
        throw NoSmallRoot("w_of_beta: no root below 1/2 at beta = " + std::to_string(beta));
    return root;
}

bool w_within_cubed_bound(double beta) {
    const double w = w_of_beta(beta);
    return w > 0.0 && w < 1.0 / (beta * beta * beta);
}

std::vector<OccupationPoint> build_S(double beta) {
    const double w = w_of_beta(beta);
    double coords[3] = {w, 0.5, 1.0 - w};
    std::sort(coords, coords + 3);
    const InteractionModel model = three_walk_z(beta);

    std::vector<OccupationPoint> points;
    do {
        OccupationPoint p(3, 2,
                          {coords[0], 1.0 - coords[0], coords[1], 1.0 - coords[1], coords[2],
                           1.0 - coords[2]});
        if (field_F(model, p).max_abs() >= 1e-9)
            throw NoConvergence("build_S: candidate point is not an equilibrium to 1e-9");
        points.push_back(std::move(p));
    } while (std::next_permutation(coords, coords + 3));
    return points;
}

double probe_beta0(const std::vector<double>& beta_grid) {
    if (beta_grid.empty())
        throw OutOfRange("probe_beta0: empty grid");
    for (std::size_t k = 0; k < beta_grid.size(); ++k) {
        if (!(beta_grid[k] > 2.0))
            throw OutOfRange("probe_beta0: grid values must exceed 2");
        if (k > 0 && !(beta_grid[k] > beta_grid[k - 1]))
            throw OutOfRange("probe_beta0: grid must be strictly increasing");
    }
    for (double beta : beta_grid) {
        bool ok = true;
        try {
            if (!w_within_cubed_bound(beta)) ok = false;
            if (ok) {
                const InteractionModel model = three_walk_z(beta);
                for (const auto& p : build_S(beta))
                    if (classify(model, p).classification != Stability::LinearlyStable) {
                        ok = false;
                        break;
                    }
            }
        } catch (const NoSmallRoot&) {
            ok = false;
        }
        if (ok) return beta;
    }
    throw NotFoundOnGrid("probe_beta0: no grid point passes containment and stability");
}

}  // namespace reinforce_dyn
