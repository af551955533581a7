#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mfbo/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mfbo - multi-fidelity Bayesian optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides config and MFBO_OUT)");
        cmd->add_option("--workers", workers, "parallel workers (default: hardware threads)");
    };

    auto* run = app.add_subcommand("run", "run SFBO/MFBO campaign suites");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "run the (rho, alpha) discount sweep");
    add_common(sweep);

    double rho = 0.0, r2 = -1.0, tau1 = 0.2, tau2 = 0.75;
    std::string pairs;
    auto* advise = app.add_subcommand("advise", "apply the MFBO/SFBO decision thresholds");
    advise->add_option("--rho", rho, "cost ratio of the low-fidelity source")->required();
    advise->add_option("--r2", r2, "informativeness R^2 (if already known)");
    advise->add_option("--pairs", pairs, "CSV with lf,hf columns to estimate R^2 from");
    advise->add_option("--tau1", tau1, "cost threshold (default 0.2)");
    advise->add_option("--tau2", tau2, "informativeness threshold (default 0.75)");

    std::string r2_pairs;
    auto* est = app.add_subcommand("estimate-r2", "estimate R^2 from paired lf,hf samples");
    est->add_option("--pairs", r2_pairs, "CSV with lf,hf columns")->required();

    CLI11_PARSE(app, argc, argv);

    std::optional<std::string> out_opt =
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
    std::optional<int> workers_opt = workers < 0 ? std::nullopt : std::optional<int>(workers);

    if (run->parsed()) return mfbo::cli::cmd_run(config_path, out_opt, workers_opt);
    if (sweep->parsed()) return mfbo::cli::cmd_sweep(config_path, out_opt, workers_opt);
    if (advise->parsed()) {
        std::optional<double> r2_opt = advise->count("--r2") ? std::optional<double>(r2) : std::nullopt;
        std::optional<std::string> pairs_opt =
            pairs.empty() ? std::nullopt : std::optional<std::string>(pairs);
        return mfbo::cli::cmd_advise(rho, r2_opt, pairs_opt, tau1, tau2);
    }
    if (est->parsed()) return mfbo::cli::cmd_estimate_r2(r2_pairs);
    return mfbo::cli::kExitConfig;
}
