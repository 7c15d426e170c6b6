#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "specgap/experiments.hpp"

// specgap <experiment> --config <file> [--out <dir>] [--jobs N]
//
// The positional experiment name must match [experiment] kind in the config
// (or may be used alone when the config omits it). SPECGAP_JOBS overrides
// --jobs. Exit codes: 0 success, 2 validation failure, 3 solver failure.
int main(int argc, char** argv) {
    CLI::App app{"specgap - spectral gap laboratory for 2D magnetic Schrodinger operators"};
    std::string experiment, config_path, out_dir = "out";
    int jobs = 1;
    app.add_option("experiment", experiment,
                   "bands | model2d | supercell | quasimode | gaps | localization | "
                   "verify-identities")
        ->required();
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--jobs", jobs, "worker count (default: 1)");
    CLI11_PARSE(app, argc, argv);

    if (const char* env = std::getenv("SPECGAP_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) jobs = j;
    }

    specgap::Config cfg;
    try {
        cfg = specgap::Config::parse_file(config_path);
        const std::string kind = cfg.get_or("experiment", "kind", "");
        if (kind.empty())
            cfg.set("experiment", "kind", experiment);
        else if (kind != experiment) {
            fprintf(stderr, "config error: %s: [experiment] kind '%s' does not match '%s'\n",
                    config_path.c_str(), kind.c_str(), experiment.c_str());
            return 2;
        }
    } catch (const specgap::Error& e) {
        fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    return specgap::run_experiment(cfg, out_dir, jobs);
}
