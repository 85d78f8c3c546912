#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include <fmmd/csv.hpp>

#include "experiments.hpp"

namespace {

using fmmd::bench::ExperimentConfig;

// flags win over config-file values, so config parsing fills defaults first
void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fmmd::DataError("cannot open config '" + path + "'", 0);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw fmmd::DataError(std::string("config parse failure: ") + e.what(), 0);
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("trials")) cfg.n_trials = j["trials"].get<int>();
    if (j.contains("perms")) cfg.n_perm = j["perms"].get<int>();
    if (j.contains("n")) cfg.n_samples = j["n"].get<int>();
    if (j.contains("mesh")) cfg.mesh_size = j["mesh"].get<int>();
    if (j.contains("kernel")) cfg.kernels = {j["kernel"].get<std::string>()};
    if (j.contains("data")) cfg.data_path = j["data"].get<std::string>();
    if (j.contains("paper_scale")) cfg.paper_scale = j["paper_scale"].get<bool>();
    if (j.contains("deltas")) cfg.deltas = j["deltas"].get<std::vector<double>>();
    if (j.contains("mesh_grid")) cfg.mesh_grid = j["mesh_grid"].get<std::vector<int>>();
    if (j.contains("lengthscales"))
        cfg.lengthscales = j["lengthscales"].get<std::vector<double>>();
    if (j.contains("subsample_sizes"))
        cfg.subsample_sizes = j["subsample_sizes"].get<std::vector<int>>();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw fmmd::DataError("cannot open '" + out_path + "' for writing", 0);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample testing for functional data via kernel MMD"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path, out_path, kernel_id;

    const std::vector<std::string> experiments = {"scaling",      "mean-shift", "var-shift-1",
                                                  "var-shift-2",  "higher-order", "validate",
                                                  "size",         "growth"};
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--alpha", cfg.alpha, "test level");
        sub->add_option("--trials", cfg.n_trials, "monte-carlo trials per grid cell");
        sub->add_option("--perms", cfg.n_perm, "bootstrap permutations per test");
        sub->add_option("--n", cfg.n_samples, "samples per side (0 = experiment default)");
        sub->add_option("--mesh", cfg.mesh_size, "mesh size (0 = experiment default)");
        sub->add_option("--kernel", kernel_id, "restrict to one kernel: ID|CEXP|COV|SQR|FPCA");
        sub->add_option("--out", out_path, "output csv path (default: stdout)");
        sub->add_flag("--paper-scale", cfg.paper_scale, "500 trials, 1000 permutations");
        sub->add_option("--config", config_path, "json config; explicit flags win");
        if (name == "growth" || name == "size")
            sub->add_option("--data", cfg.data_path, "function-set csv");
        if (name == "growth") sub->add_option("csv", cfg.data_path, "function-set csv (positional)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            ExperimentConfig file_cfg;
            apply_config_file(file_cfg, config_path);
            // re-parse so explicit flags override config values
            std::swap(cfg, file_cfg);
            try {
                app.clear();
                app.parse(argc, argv);
            } catch (const CLI::ParseError&) {
                return 2;
            }
        }
        cfg.experiment = app.get_subcommands().front()->get_name();
        if (!kernel_id.empty()) cfg.kernels = {kernel_id};
        if (cfg.paper_scale) {
            cfg.n_trials = 500;
            cfg.n_perm = 1000;
        }

        using namespace fmmd::bench;
        if (cfg.experiment == "validate") {
            const auto outcome = run_validate(cfg);
            emit(out_path, validate_csv(outcome.rows));
            if (outcome.any_flagged) {
                std::cerr << "validate: at least one case drifted beyond 3 standard errors\n";
                return 4;
            }
            return 0;
        }

        std::vector<fmmd::ResultRow> rows;
        if (cfg.experiment == "scaling")
            rows = run_scaling(cfg);
        else if (cfg.experiment == "size")
            rows = run_size(cfg);
        else if (cfg.experiment == "growth")
            rows = run_growth(cfg);
        else
            rows = run_benchmark(cfg);
        emit(out_path, fmmd::results_csv_to_string(rows));
        return 0;
    } catch (const fmmd::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
