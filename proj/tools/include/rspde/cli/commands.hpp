#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rspde/cli/config.hpp"
#include "rspde/verify.hpp"

namespace rspde::cli {

/// Exit codes of the command-line contract.
enum ExitCode : int { kPass = 0, kError = 1, kFail = 2 };

struct CommandOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;   ///< overrides run.seed
    std::optional<std::size_t> paths;    ///< overrides run.n_paths
    double m_scale = 1.0;                ///< debug: multiplies M in the checkers
};

/// Config with the command-line overrides applied.
ExperimentConfig apply_overrides(ExperimentConfig config, const CommandOptions& options);

/// Writes path_NNNN.csv / .bin per stream and manifest.json into out_dir.
/// The initial field is check.h. Returns kPass.
int cmd_simulate(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);

/// Runs the verifier named by check.kind (or `kind` when nonempty) at every
/// time in check.times; writes report.json and summary.csv. kPass when every
/// report passes, otherwise kFail.
int cmd_check(const ExperimentConfig& config, const std::string& kind, const CommandOptions& options,
              std::ostream& log);

/// Rows t,M,zeta,int_exp_neg_zeta,harnack_rhs for the given times.
std::string bounds_csv(double L_b, double L_sigma, double kappa1, const std::vector<double>& times, double dist2 = 1.0);

/// Penalisation convergence over run.eps_ladder: converge.csv and report.json.
int cmd_converge_eps(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log);

/// The checker reports cmd_check would produce, without writing files.
std::vector<CheckReport> run_checks(const ExperimentConfig& config, const std::string& kind, double m_scale = 1.0);

/// summary.csv content for a list of reports.
std::string summary_csv(const std::vector<CheckReport>& reports);

}  // namespace rspde::cli
