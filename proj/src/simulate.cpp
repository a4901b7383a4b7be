#include "reinforce_dyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "reinforce_dyn/presets.hpp"

namespace reinforce_dyn {

namespace {

// Reusable step driver; keeps the per-step buffers alive across a run.
struct Stepper {
    std::vector<double> x;    // occupation before the step
    std::vector<double> pi;   // kernel at x
    std::vector<int> chosen;  // sampled vertex per walk
    double gamma = 0.0;

    void advance(const InteractionModel& model, WalkState& state) {
        const int m = state.m;
        const int d = state.d;
        const std::size_t n = static_cast<std::size_t>(m) * d;
        x.resize(n);
        pi.resize(n);
        chosen.resize(m);
        const double inv = 1.0 / static_cast<double>(state.n + d);
        for (std::size_t s = 0; s < n; ++s)
            x[s] = static_cast<double>(state.counts[s]) * inv;
        detail::kernel_pi_into(model, x.data(), pi.data());
        gamma = state.gamma();
        for (int i = 0; i < m; ++i) {
            const double u = state.rng.next_uniform();
            const double* row = pi.data() + static_cast<std::size_t>(i) * d;
            int v = d - 1;  // final vertex absorbs inverse-CDF rounding
            double cum = 0.0;
            for (int w = 0; w < d - 1; ++w) {
                cum += row[w];
                if (u < cum) {
                    v = w;
                    break;
                }
            }
            chosen[i] = v;
            ++state.counts[static_cast<std::size_t>(i) * d + v];
            state.positions[i] = v;
        }
        state.tau += gamma;
        ++state.n;
    }
};

long long auto_stride(long long n_steps, long long record_stride) {
    if (record_stride > 0) return record_stride;
    return std::max<long long>(1, n_steps / 1000);
}

template <class Hook>
RunResult run_core(const InteractionModel& model, std::uint64_t seed, long long n_steps,
                   long long record_stride, Hook&& hook) {
    if (n_steps < 1)
        throw BadDimension("run: need n_steps >= 1");
    const long long stride = auto_stride(n_steps, record_stride);
    WalkState state = init_walks(model, seed);
    const std::size_t nd = state.counts.size();

    RunResult result;
    auto record = [&] {
        result.sample_steps.push_back(state.n);
        result.sample_tau.push_back(state.tau);
        result.sample_points.push_back(state.occupation().flat());
    };
    record();

    Stepper st;
    std::vector<double> martingale(nd, 0.0);
    std::vector<double> snapshot;
    long long next_dyadic = 1;

    for (long long k = 0; k < n_steps; ++k) {
        st.advance(model, state);
        for (std::size_t s = 0; s < nd; ++s) martingale[s] -= st.gamma * st.pi[s];
        for (int i = 0; i < state.m; ++i)
            martingale[static_cast<std::size_t>(i) * state.d + st.chosen[i]] += st.gamma;
        double norm = 0.0;
        for (double e : martingale) norm = std::max(norm, std::abs(e));
        result.martingale_max_norm = std::max(result.martingale_max_norm, norm);
        if (state.n == next_dyadic) {
            if (!snapshot.empty()) {
                double inc = 0.0;
                for (std::size_t s = 0; s < nd; ++s)
                    inc = std::max(inc, std::abs(martingale[s] - snapshot[s]));
                result.dyadic_increments.emplace_back(next_dyadic / 2, inc);
            }
            snapshot = martingale;
            next_dyadic *= 2;
        }
        hook(state.n - 1, st, state);
        if (state.n % stride == 0 || state.n == n_steps) record();
    }
    result.martingale_final = std::move(martingale);
    result.final_state = std::move(state);
    return result;
}

}  // namespace

OccupationPoint WalkState::occupation() const {
    std::vector<double> x(counts.size());
    const double inv = 1.0 / static_cast<double>(n + d);
    for (std::size_t s = 0; s < counts.size(); ++s)
        x[s] = static_cast<double>(counts[s]) * inv;
    return OccupationPoint(m, d, std::move(x));
}

WalkState init_walks(const InteractionModel& model, std::uint64_t seed) {
    WalkState state;
    state.m = model.num_walks();
    state.d = model.num_vertices();
    state.counts.assign(static_cast<std::size_t>(state.m) * state.d, 1);
    state.positions.assign(state.m, -1);
    state.rng = SplitMix64(seed);
    return state;
}

void step(const InteractionModel& model, WalkState& state) {
    if (state.m != model.num_walks() || state.d != model.num_vertices())
        throw WrongShape("step: state shape does not match model");
    Stepper st;
    st.advance(model, state);
}

SaAudit step_audited(const InteractionModel& model, WalkState& state) {
    if (state.m != model.num_walks() || state.d != model.num_vertices())
        throw WrongShape("step: state shape does not match model");
    const std::size_t nd = state.counts.size();
    Stepper st;
    st.advance(model, state);

    SaAudit audit;
    audit.gamma_n = st.gamma;
    audit.xi = st.chosen;
    audit.u_n.assign(nd, 0.0);
    for (std::size_t s = 0; s < nd; ++s) audit.u_n[s] = -st.pi[s];
    for (int i = 0; i < state.m; ++i)
        audit.u_n[static_cast<std::size_t>(i) * state.d + st.chosen[i]] += 1.0;

    // reconstruct X(n+1) - X(n) = gamma (F + U) with F = pi - x
    const double inv_after = 1.0 / static_cast<double>(state.n + state.d);
    double residual = 0.0;
    for (std::size_t s = 0; s < nd; ++s) {
        const double x_after = static_cast<double>(state.counts[s]) * inv_after;
        const double f = st.pi[s] - st.x[s];
        const double predicted = st.gamma * (f + audit.u_n[s]);
        residual = std::max(residual, std::abs((x_after - st.x[s]) - predicted));
    }
    audit.reconstruction_residual = residual;
    return audit;
}

RunResult run(const InteractionModel& model, std::uint64_t seed, long long n_steps,
              long long record_stride) {
    return run_core(model, seed, n_steps, record_stride,
                    [](long long, const Stepper&, const WalkState&) {});
}

double noise_bound_s(const InteractionModel& model, const OccupationPoint& x) {
    detail::check_same_shape(model, x);
    std::vector<double> pi(x.size());
    detail::kernel_pi_into(model, x.flat().data(), pi.data());
    double pmin = pi[0];
    for (double e : pi) pmin = std::min(pmin, e);
    const int m = model.num_walks();
    const int d = model.num_vertices();
    return std::pow(pmin, m + 1) / (2.0 * m * d);
}

ZRunResult run_z_walks(double beta, std::uint64_t seed, long long n_steps,
                       std::array<long long, 3> s0, long long record_stride) {
    const InteractionModel model = three_walk_z(beta);
    const long long stride = auto_stride(n_steps, record_stride);
    const long long window_start = n_steps - n_steps / 10;

    ZRunResult result;
    result.final_state.s0 = s0;
    std::array<long long, 3> s = s0;
    std::array<long long, 3> window_rights{};
    result.z_path.push_back(s);

    result.base = run_core(
        model, seed, n_steps, stride,
        [&](long long step_index, const Stepper& st, const WalkState& ws) {
            for (int i = 0; i < 3; ++i) {
                const int move = st.chosen[i] == 1 ? 1 : -1;
                s[i] += move;
                if (step_index >= window_start && move == 1) ++window_rights[i];
            }
            if (ws.n % stride == 0 || ws.n == n_steps) result.z_path.push_back(s);
        });

    result.final_state.s = s;
    result.final_state.inner = result.base.final_state;
    const long long window_len = n_steps - window_start;
    for (int i = 0; i < 3; ++i)
        result.empirical_step_probs[i] =
            window_len > 0 ? static_cast<double>(window_rights[i]) / static_cast<double>(window_len)
                           : 0.0;
    return result;
}

}  // namespace reinforce_dyn
