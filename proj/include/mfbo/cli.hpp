#pragma once

#include <optional>
#include <string>

namespace mfbo::cli {

// exit codes shared by all subcommands
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

/// Runs the campaign suite(s) described by the JSON config file and writes
/// traces, the aligned-regret CSV, discount JSON and a manifest into the
/// output directory. The MFBO_OUT environment variable overrides the config's
/// out_dir (and the --out flag overrides both).
int cmd_run(const std::string& config_path, const std::optional<std::string>& out_override,
            std::optional<int> workers_override);

/// Runs the (rho, alpha) sweep described by the JSON config file and writes
/// the long-format heatmap CSV plus a manifest.
int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_override,
              std::optional<int> workers_override);

/// Applies the decision thresholds to (rho, R^2). R^2 comes either from the
/// flag or from a paired-sample CSV.
int cmd_advise(double rho, std::optional<double> r2, const std::optional<std::string>& pairs_csv,
               double tau1, double tau2);

/// Prints the R^2 of a paired-sample CSV (columns lf, hf).
int cmd_estimate_r2(const std::string& pairs_csv);

} // namespace mfbo::cli
