#include <string>

#include <CLI11.hpp>

#include "reinforce_dyn/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interacting reinforced walks: simulation, mean-field flow, equilibria"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out_dir;
    };
    Args args[4];
    const char* names[4] = {"simulate", "flow", "equilibria", "phase-scan"};
    const char* blurbs[4] = {"run the stochastic walks over an ensemble of seeds",
                             "integrate the mean-field flow",
                             "locate and classify equilibria",
                             "sweep beta over a grid"};
    CLI::App* subs[4];
    for (int k = 0; k < 4; ++k) {
        subs[k] = app.add_subcommand(names[k], blurbs[k]);
        subs[k]->add_option("--config", args[k].config, "path to a JSON config")
            ->required();
        subs[k]->add_option("--out-dir", args[k].out_dir,
                            "override the config's output directory");
    }

    CLI11_PARSE(app, argc, argv);
    for (int k = 0; k < 4; ++k)
        if (subs[k]->parsed())
            return reinforce_dyn::run_command(names[k], args[k].config, args[k].out_dir);
    return 2;
}
