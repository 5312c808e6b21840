#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swarmsteer/error.hpp"
#include "swarmsteer/presets.hpp"
#include "swarmsteer/runner.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("SWARMSTEER_OUT")) {
        return fs::path(env);
    }
    return fs::path("swarmsteer-out");
}

int do_simulate(const std::string& config_arg, const fs::path& out_dir, bool plots,
                std::optional<std::uint64_t> seed) {
    swarmsteer::Experiment exp;
    if (fs::exists(config_arg)) {
        exp = swarmsteer::load_experiment(config_arg, seed);
    } else if (const swarmsteer::ExperimentPreset* p = swarmsteer::find_preset(config_arg)) {
        exp = swarmsteer::experiment_from_json(p->json, p->name, seed);
    } else {
        std::cerr << "error: no such config file or preset: " << config_arg << "\n";
        return 1;
    }
    swarmsteer::RunOutputs out = swarmsteer::execute_experiment(exp, out_dir, plots, std::cout);
    std::cout << "outputs: " << out.dir.string() << "\n";
    return out.report.all_pass ? 0 : 2;
}

int do_compare(const fs::path& run_path, const fs::path& ideal_path, const fs::path& out_dir) {
    swarmsteer::TrajectoryData run_data = swarmsteer::read_trajectory_csv(run_path);
    swarmsteer::TrajectoryData ideal_data = swarmsteer::read_trajectory_csv(ideal_path);
    swarmsteer::CompareResult cmp = swarmsteer::compare_trajectories(run_data, ideal_data);
    swarmsteer::write_compare_outputs(cmp, out_dir, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarmsteer: steering-law swarm simulations and experiments"};
    app.require_subcommand(1);

    std::string config_arg;
    std::string run_csv, ideal_csv;
    std::string out_dir = default_out_dir().string();
    bool plots = false;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_value = 0;

    CLI::App* simulate = app.add_subcommand("simulate", "run one experiment config or preset");
    simulate->add_option("config", config_arg, "JSON config path or preset name")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_flag("--plots", plots, "write SVG plot panels");
    CLI::Option* seed_opt = simulate->add_option("--seed", seed_value, "override the config seed");

    CLI::App* compare = app.add_subcommand("compare", "position-error metrics for two logs");
    compare->add_option("run", run_csv, "trajectory CSV of the run")->required();
    compare->add_option("ideal", ideal_csv, "trajectory CSV of the reference")->required();
    compare->add_option("--out", out_dir, "output directory");

    CLI::App* presets = app.add_subcommand("presets", "bundled experiments");
    CLI::App* presets_list = presets->add_subcommand("list", "print preset names");
    CLI::App* presets_run = presets->add_subcommand("run-all", "run every preset");
    presets->require_subcommand(1);
    presets_run->add_option("--out", out_dir, "output directory");
    presets_run->add_flag("--plots", plots, "write SVG plot panels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            if (seed_opt->count() > 0) seed = seed_value;
            return do_simulate(config_arg, out_dir, plots, seed);
        }
        if (compare->parsed()) {
            return do_compare(run_csv, ideal_csv, out_dir);
        }
        if (presets_list->parsed()) {
            for (const std::string& name : swarmsteer::preset_names()) {
                std::cout << name << "\n";
            }
            return 0;
        }
        if (presets_run->parsed()) {
            return swarmsteer::run_all_presets(out_dir, plots, std::cout);
        }
    } catch (const swarmsteer::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
