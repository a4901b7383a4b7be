#include "reinforce_dyn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "reinforce_dyn/equilibria.hpp"
#include "reinforce_dyn/flow.hpp"
#include "reinforce_dyn/presets.hpp"
#include "reinforce_dyn/rng.hpp"
#include "reinforce_dyn/simulate.hpp"

namespace reinforce_dyn {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

void check_keys(const ojson& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            bad(section.empty() ? item.key() : section + "." + item.key(), "unknown key");
    }
}

double as_finite(const ojson& j, const std::string& field) {
    if (!j.is_number()) bad(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(field, "must be finite");
    return v;
}

long long as_integer(const ojson& j, const std::string& field) {
    if (!j.is_number_integer()) bad(field, "expected an integer");
    return j.get<long long>();
}

ModelSpec parse_model(const ojson& j) {
    if (!j.is_object()) bad("model", "expected an object");
    ModelSpec spec;
    if (!j.contains("preset") || !j.at("preset").is_string())
        bad("model.preset", "required string");
    spec.preset = j.at("preset").get<std::string>();

    const auto need_beta = [&] {
        if (!j.contains("beta")) bad("model.beta", "required for preset '" + spec.preset + "'");
        spec.beta = as_finite(j.at("beta"), "model.beta");
    };
    if (spec.preset == "two-walk-k2") {
        check_keys(j, "model", {"preset", "beta"});
        spec.m = 2;
        spec.d = 2;
        need_beta();
    } else if (spec.preset == "three-walk-z") {
        check_keys(j, "model", {"preset", "beta"});
        spec.m = 3;
        spec.d = 2;
        need_beta();
    } else if (spec.preset == "equal-beta") {
        check_keys(j, "model", {"preset", "beta", "m", "d"});
        if (!j.contains("m") || !j.contains("d")) bad("model", "'equal-beta' needs m and d");
        spec.m = static_cast<int>(as_integer(j.at("m"), "model.m"));
        spec.d = static_cast<int>(as_integer(j.at("d"), "model.d"));
        need_beta();
    } else if (spec.preset == "explicit") {
        check_keys(j, "model", {"preset", "m", "d", "alpha", "allow_asymmetric"});
        if (!j.contains("m") || !j.contains("d") || !j.contains("alpha"))
            bad("model", "'explicit' needs m, d and alpha");
        spec.m = static_cast<int>(as_integer(j.at("m"), "model.m"));
        spec.d = static_cast<int>(as_integer(j.at("d"), "model.d"));
        if (!j.at("alpha").is_array()) bad("model.alpha", "expected an array");
        for (const auto& e : j.at("alpha"))
            spec.alpha.push_back(as_finite(e, "model.alpha"));
        if (j.contains("allow_asymmetric")) {
            if (!j.at("allow_asymmetric").is_boolean())
                bad("model.allow_asymmetric", "expected a boolean");
            spec.allow_asymmetric = j.at("allow_asymmetric").get<bool>();
        }
    } else {
        bad("model.preset", "unknown preset '" + spec.preset + "'");
    }
    if (spec.m < 1 || spec.d < 2) bad("model", "need m >= 1 and d >= 2");
    try {
        build_model(spec);
    } catch (const Error& e) {
        bad("model", e.what());
    }
    return spec;
}

}  // namespace

InteractionModel build_model(const ModelSpec& spec) {
    if (spec.preset == "two-walk-k2") return two_walk_k2(spec.beta);
    if (spec.preset == "three-walk-z") return three_walk_z(spec.beta);
    if (spec.preset == "equal-beta") return equal_beta_repelling(spec.m, spec.d, spec.beta);
    if (spec.preset == "explicit")
        return InteractionModel(spec.m, spec.d, spec.alpha, spec.allow_asymmetric);
    throw ConfigError("config field 'model.preset': unknown preset '" + spec.preset + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "", {"model", "seeds", "simulate", "flow", "solver", "phase_scan", "out_dir"});

    ExperimentConfig config;
    if (!j.contains("model")) bad("model", "section required");
    config.model = parse_model(j.at("model"));

    if (j.contains("seeds")) {
        if (!j.at("seeds").is_array() || j.at("seeds").empty())
            bad("seeds", "expected a non-empty array of integers");
        for (const auto& e : j.at("seeds")) {
            if (e.is_number_unsigned()) {
                config.seeds.push_back(e.get<std::uint64_t>());
            } else {
                const long long v = as_integer(e, "seeds");
                if (v < 0) bad("seeds", "must be non-negative");
                config.seeds.push_back(static_cast<std::uint64_t>(v));
            }
        }
    }

    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        if (!s.is_object()) bad("simulate", "expected an object");
        check_keys(s, "simulate", {"n_steps", "record_stride"});
        SimulateParams params;
        if (!s.contains("n_steps")) bad("simulate.n_steps", "required");
        params.n_steps = as_integer(s.at("n_steps"), "simulate.n_steps");
        if (params.n_steps < 1) bad("simulate.n_steps", "must be positive");
        if (s.contains("record_stride")) {
            params.record_stride = as_integer(s.at("record_stride"), "simulate.record_stride");
            if (params.record_stride < 0) bad("simulate.record_stride", "must be >= 0");
        }
        config.simulate = params;
    }

    if (j.contains("flow")) {
        const auto& f = j.at("flow");
        if (!f.is_object()) bad("flow", "expected an object");
        check_keys(f, "flow", {"dt", "t_end", "record_every", "x0"});
        if (f.contains("dt")) {
            config.flow.dt = as_finite(f.at("dt"), "flow.dt");
            if (!(config.flow.dt > 0.0)) bad("flow.dt", "must be positive");
        }
        if (f.contains("t_end")) {
            config.flow.t_end = as_finite(f.at("t_end"), "flow.t_end");
            if (!(config.flow.t_end > 0.0)) bad("flow.t_end", "must be positive");
        }
        if (f.contains("record_every")) {
            const long long r = as_integer(f.at("record_every"), "flow.record_every");
            if (r < 1) bad("flow.record_every", "must be >= 1");
            config.flow.record_every = static_cast<int>(r);
        }
        if (f.contains("x0")) {
            if (!f.at("x0").is_array()) bad("flow.x0", "expected an array");
            std::vector<double> x0;
            for (const auto& e : f.at("x0")) x0.push_back(as_finite(e, "flow.x0"));
            try {
                OccupationPoint check(config.model.m, config.model.d, x0);
            } catch (const Error& e) {
                bad("flow.x0", e.what());
            }
            config.flow.x0 = std::move(x0);
        }
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) bad("solver", "expected an object");
        check_keys(s, "solver", {"n_starts", "tol", "max_iter", "dedup_tol"});
        if (s.contains("n_starts")) {
            config.solver.n_starts = static_cast<int>(as_integer(s.at("n_starts"), "solver.n_starts"));
            if (config.solver.n_starts < 1) bad("solver.n_starts", "must be >= 1");
        }
        if (s.contains("tol")) {
            config.solver.tol = as_finite(s.at("tol"), "solver.tol");
            if (!(config.solver.tol > 0.0)) bad("solver.tol", "must be positive");
        }
        if (s.contains("max_iter")) {
            config.solver.max_iter = static_cast<int>(as_integer(s.at("max_iter"), "solver.max_iter"));
            if (config.solver.max_iter < 1) bad("solver.max_iter", "must be >= 1");
        }
        if (s.contains("dedup_tol")) {
            config.solver.dedup_tol = as_finite(s.at("dedup_tol"), "solver.dedup_tol");
            if (!(config.solver.dedup_tol > 0.0)) bad("solver.dedup_tol", "must be positive");
        }
    }

    if (j.contains("phase_scan")) {
        const auto& p = j.at("phase_scan");
        if (!p.is_object()) bad("phase_scan", "expected an object");
        check_keys(p, "phase_scan", {"beta_grid"});
        if (!p.contains("beta_grid") || !p.at("beta_grid").is_array() || p.at("beta_grid").empty())
            bad("phase_scan.beta_grid", "required non-empty array");
        for (const auto& e : p.at("beta_grid"))
            config.beta_grid.push_back(as_finite(e, "phase_scan.beta_grid"));
    }

    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string() || j.at("out_dir").get<std::string>().empty())
            bad("out_dir", "expected a non-empty string");
        config.out_dir = j.at("out_dir").get<std::string>();
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

int worker_count(std::size_t jobs) {
    if (jobs <= 1) return 1;
    unsigned long cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("REINFORCE_DYN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            cap = std::min(cap, static_cast<unsigned long>(v));
    }
    return static_cast<int>(std::min<std::size_t>(jobs, cap));
}

namespace {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::exception_ptr failure;
    auto drain = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) return;
            try {
                body(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string occupation_header(int m, int d) {
    std::string h;
    for (int i = 0; i < m; ++i)
        for (int v = 0; v < d; ++v)
            h += ",x_" + std::to_string(i + 1) + "_" + std::to_string(v + 1);
    return h;
}

ojson point_json(const std::vector<double>& flat) {
    ojson arr = ojson::array();
    for (double e : flat) arr.push_back(e);
    return arr;
}

ojson equilibria_brief(const std::vector<Equilibrium>& eqs) {
    ojson arr = ojson::array();
    for (const auto& eq : eqs) {
        ojson e;
        e["point"] = point_json(eq.point.flat());
        e["residual"] = eq.residual;
        e["classification"] = to_string(eq.stability.classification);
        arr.push_back(std::move(e));
    }
    return arr;
}

std::pair<int, double> nearest_equilibrium(const std::vector<Equilibrium>& eqs,
                                           const std::vector<double>& x) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        double dist = 0.0;
        for (std::size_t s = 0; s < x.size(); ++s)
            dist = std::max(dist, std::abs(x[s] - eqs[k].point.flat()[s]));
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(k);
        }
    }
    return {best, best_dist};
}

ojson model_echo(const ModelSpec& spec) {
    ojson m;
    m["preset"] = spec.preset;
    m["m"] = spec.m;
    m["d"] = spec.d;
    if (spec.preset != "explicit") m["beta"] = spec.beta;
    return m;
}

void write_json(const fs::path& path, const ojson& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

int cmd_simulate(const ExperimentConfig& config) {
    if (!config.simulate) bad("simulate", "section required for the simulate command");
    if (config.seeds.empty()) bad("seeds", "required for the simulate command");
    const SimulateParams& params = *config.simulate;
    const InteractionModel model = build_model(config.model);
    const bool z_preset = config.model.preset == "three-walk-z";
    const bool has_l = model.lyapunov_available();
    ensure_dir(config.out_dir);

    const std::vector<Equilibrium> eqs =
        find_all(model, config.solver.n_starts, config.seeds[0], config.solver.dedup_tol,
                 config.solver.max_iter, config.solver.tol);

    std::vector<ojson> per_seed(config.seeds.size());
    parallel_for(config.seeds.size(), [&](std::size_t k) {
        const std::uint64_t seed = config.seeds[k];
        RunResult base;
        ojson extra;
        if (z_preset) {
            ZRunResult zr = run_z_walks(config.model.beta, seed, params.n_steps, {0, 0, 0},
                                        params.record_stride);
            extra["s_final"] = zr.final_state.s;
            ojson drifts = ojson::array();
            for (int i = 0; i < 3; ++i)
                drifts.push_back(static_cast<double>(zr.final_state.s[i] - zr.final_state.s0[i]) /
                                 static_cast<double>(params.n_steps));
            extra["drifts"] = std::move(drifts);
            extra["empirical_step_probs"] = zr.empirical_step_probs;
            base = std::move(zr.base);
        } else {
            base = run(model, seed, params.n_steps, params.record_stride);
        }

        auto csv = open_out(fs::path(config.out_dir) /
                            ("simulate_seed" + std::to_string(seed) + ".csv"));
        csv << "n,tau_n" << occupation_header(model.num_walks(), model.num_vertices());
        if (has_l) csv << ",L";
        csv << '\n';
        for (std::size_t r = 0; r < base.sample_steps.size(); ++r) {
            csv << base.sample_steps[r] << ',' << format_g17(base.sample_tau[r]);
            for (double e : base.sample_points[r]) csv << ',' << format_g17(e);
            if (has_l)
                csv << ','
                    << format_g17(lyapunov_L(model, OccupationPoint(model.num_walks(),
                                                                    model.num_vertices(),
                                                                    base.sample_points[r])));
            csv << '\n';
        }
        if (!csv) throw IoError("failed writing simulate CSV for seed " + std::to_string(seed));

        const std::vector<double> final_x = base.final_state.occupation().flat();
        const auto [idx, dist] = nearest_equilibrium(eqs, final_x);
        ojson entry;
        entry["seed"] = seed;
        entry["final_point"] = point_json(final_x);
        entry["nearest_equilibrium"] = idx;
        entry["distance_to_nearest"] = dist;
        double final_norm = 0.0;
        for (double e : base.martingale_final) final_norm = std::max(final_norm, std::abs(e));
        ojson mart;
        mart["final_norm"] = final_norm;
        mart["max_norm"] = base.martingale_max_norm;
        ojson dyadic = ojson::array();
        for (const auto& [n, inc] : base.dyadic_increments) dyadic.push_back(ojson{n, inc});
        mart["dyadic_increments"] = std::move(dyadic);
        entry["martingale"] = std::move(mart);
        for (auto& item : extra.items()) entry[item.key()] = item.value();
        per_seed[k] = std::move(entry);
    });

    ojson summary;
    summary["command"] = "simulate";
    summary["model"] = model_echo(config.model);
    summary["n_steps"] = params.n_steps;
    summary["equilibria"] = equilibria_brief(eqs);
    summary["per_seed"] = per_seed;
    write_json(fs::path(config.out_dir) / "simulate_summary.json", summary);
    return 0;
}

int cmd_flow(const ExperimentConfig& config) {
    if (config.seeds.empty()) bad("seeds", "required for the flow command");
    const InteractionModel model = build_model(config.model);
    const bool has_l = model.lyapunov_available();
    const int m = model.num_walks();
    const int d = model.num_vertices();
    ensure_dir(config.out_dir);

    const std::vector<Equilibrium> eqs =
        find_all(model, config.solver.n_starts, config.seeds[0], config.solver.dedup_tol,
                 config.solver.max_iter, config.solver.tol);

    std::vector<ojson> per_seed(config.seeds.size());
    parallel_for(config.seeds.size(), [&](std::size_t k) {
        const std::uint64_t seed = config.seeds[k];
        OccupationPoint x0 = [&] {
            if (config.flow.x0) return OccupationPoint(m, d, *config.flow.x0);
            SplitMix64 rng(seed);
            return OccupationPoint(m, d, dirichlet_point(rng, m, d));
        }();
        const Trajectory traj =
            integrate(model, x0, config.flow.dt, config.flow.t_end, config.flow.record_every);

        auto csv = open_out(fs::path(config.out_dir) /
                            ("flow_seed" + std::to_string(seed) + ".csv"));
        csv << "t" << occupation_header(m, d);
        if (has_l) csv << ",L";
        csv << '\n';
        for (std::size_t r = 0; r < traj.times.size(); ++r) {
            csv << format_g17(traj.times[r]);
            for (double e : traj.points[r].flat()) csv << ',' << format_g17(e);
            if (has_l) csv << ',' << format_g17(traj.lyapunov[r]);
            csv << '\n';
        }
        if (!csv) throw IoError("failed writing flow CSV for seed " + std::to_string(seed));

        const std::vector<double>& final_x = traj.points.back().flat();
        const auto [idx, dist] = nearest_equilibrium(eqs, final_x);
        ojson entry;
        entry["seed"] = seed;
        entry["x0"] = point_json(x0.flat());
        entry["final_point"] = point_json(final_x);
        entry["nearest_equilibrium"] = idx;
        entry["distance_to_nearest"] = dist;
        entry["min_entry_before_renorm"] = traj.min_entry_before_renorm;
        if (has_l) {
            const MonotoneReport report = lyapunov_monotone_check(model, traj, 1e-9);
            entry["violations"] = report.violations;
            entry["max_increase"] = report.max_increase;
        }
        per_seed[k] = std::move(entry);
    });

    ojson summary;
    summary["command"] = "flow";
    summary["model"] = model_echo(config.model);
    summary["dt"] = config.flow.dt;
    summary["t_end"] = config.flow.t_end;
    summary["equilibria"] = equilibria_brief(eqs);
    summary["per_seed"] = per_seed;
    write_json(fs::path(config.out_dir) / "flow_summary.json", summary);
    return 0;
}

int cmd_equilibria(const ExperimentConfig& config) {
    const InteractionModel model = build_model(config.model);
    const std::uint64_t seed = config.seeds.empty() ? 1 : config.seeds[0];
    ensure_dir(config.out_dir);

    const std::vector<Equilibrium> eqs =
        find_all(model, config.solver.n_starts, seed, config.solver.dedup_tol,
                 config.solver.max_iter, config.solver.tol);
    const ConditionReport conditions = check_conditions(model);

    ojson out;
    out["command"] = "equilibria";
    out["model"] = model_echo(config.model);
    out["n_starts"] = config.solver.n_starts;
    ojson list = ojson::array();
    for (const auto& eq : eqs) {
        ojson e;
        e["point"] = point_json(eq.point.flat());
        e["residual"] = eq.residual;
        e["classification"] = to_string(eq.stability.classification);
        e["hyperbolic_margin"] = eq.stability.hyperbolic_margin;
        ojson eig = ojson::array();
        for (const auto& ev : eq.stability.eigenvalues)
            eig.push_back(ojson{ev.real(), ev.imag()});
        e["eigenvalues"] = std::move(eig);
        e["basin_hits"] = eq.basin_hits;
        list.push_back(std::move(e));
    }
    out["equilibria"] = std::move(list);
    ojson cond;
    cond["c1"] = conditions.c1;
    cond["c2"] = conditions.c2;
    cond["c3"] = conditions.c3;
    cond["c3_margin"] = conditions.c3_margin;
    cond["dominance_ok"] = conditions.dominance_ok;
    out["conditions"] = std::move(cond);
    write_json(fs::path(config.out_dir) / "equilibria.json", out);
    return 0;
}

int cmd_phase_scan(const ExperimentConfig& config) {
    if (config.beta_grid.empty()) bad("phase_scan.beta_grid", "required for the phase-scan command");
    if (config.model.preset == "explicit")
        bad("model.preset", "phase-scan needs a beta-parameterized preset");
    const std::uint64_t seed = config.seeds.empty() ? 1 : config.seeds[0];
    ensure_dir(config.out_dir);

    auto csv = open_out(fs::path(config.out_dir) / "phase_scan.csv");
    csv << "beta,n_equilibria,n_stable,a,w\n";
    for (const double beta : config.beta_grid) {
        ModelSpec spec = config.model;
        spec.beta = beta;
        const InteractionModel model = build_model(spec);
        const std::vector<Equilibrium> eqs =
            find_all(model, config.solver.n_starts, seed, config.solver.dedup_tol,
                     config.solver.max_iter, config.solver.tol);
        int stable = 0;
        for (const auto& eq : eqs)
            if (eq.stability.classification == Stability::LinearlyStable) ++stable;
        double a = std::numeric_limits<double>::quiet_NaN();
        double w = std::numeric_limits<double>::quiet_NaN();
        try {
            a = a_of_beta(beta);
        } catch (const Error&) {
        }
        try {
            w = w_of_beta(beta);
        } catch (const Error&) {
        }
        csv << format_g17(beta) << ',' << eqs.size() << ',' << stable << ',' << format_g17(a)
            << ',' << format_g17(w) << '\n';
    }
    if (!csv) throw IoError("failed writing phase_scan.csv");
    return 0;
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir_override) {
    try {
        ExperimentConfig config = parse_config_file(config_path);
        if (!out_dir_override.empty()) config.out_dir = out_dir_override;
        if (command == "simulate") return cmd_simulate(config);
        if (command == "flow") return cmd_flow(config);
        if (command == "equilibria") return cmd_equilibria(config);
        if (command == "phase-scan") return cmd_phase_scan(config);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace reinforce_dyn
