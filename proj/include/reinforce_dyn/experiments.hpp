#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reinforce_dyn/model.hpp"

namespace reinforce_dyn {

// Model section of a config: one of the named presets or an explicit tensor.
struct ModelSpec {
    std::string preset;  // "two-walk-k2" | "three-walk-z" | "equal-beta" | "explicit"
    int m = 0;
    int d = 0;
    double beta = 0.0;
    std::vector<double> alpha;
    bool allow_asymmetric = false;
};

struct SimulateParams {
    long long n_steps = 0;
    long long record_stride = 0;  // 0 = pick ~1000 samples
};

struct FlowParams {
    double dt = 0.005;
    double t_end = 30.0;
    int record_every = 1;
    std::optional<std::vector<double>> x0;  // absent = random start per seed
};

struct SolverParams {
    int n_starts = 100;
    double tol = 1e-12;
    int max_iter = 20000;
    double dedup_tol = 1e-6;
};

struct ExperimentConfig {
    ModelSpec model;
    std::vector<std::uint64_t> seeds;
    std::optional<SimulateParams> simulate;
    FlowParams flow;
    SolverParams solver;
    std::vector<double> beta_grid;  // phase_scan section
    std::string out_dir = ".";
};

// Parses and fully validates a JSON config; throws ConfigError naming the
// offending field.  Nothing is written during validation.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

InteractionModel build_model(const ModelSpec& spec);

// Subcommand bodies.  Each writes its outputs under config.out_dir and
// returns 0; failures surface as exceptions (ConfigError for bad input,
// library errors for numerical trouble).
int cmd_simulate(const ExperimentConfig& config);
int cmd_flow(const ExperimentConfig& config);
int cmd_equilibria(const ExperimentConfig& config);
int cmd_phase_scan(const ExperimentConfig& config);

// CLI entry: loads the config, applies the out-dir override if nonempty,
// dispatches, and maps exceptions to the exit-code contract
// (0 ok, 2 config error, 3 numerical/runtime failure).
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir_override);

// Shortest text that round-trips a double through strtod ("%.17g").
std::string format_g17(double value);

// Worker threads for an ensemble of the given size: hardware concurrency
// capped by the REINFORCE_DYN_THREADS environment variable.
int worker_count(std::size_t jobs);

}  // namespace reinforce_dyn
