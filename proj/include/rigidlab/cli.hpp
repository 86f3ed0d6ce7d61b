#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rigidlab {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct Tolerances {
    std::optional<double> eig_tol, match_tol, coh_tol, conj_tol, kernel_tol, eig_match_tol, mme_tol, tail_tol,
        truncation_tol;
};

struct ExperimentConfig {
    std::string experiment_id = "experiment";
    std::optional<nlohmann::json> map, map2, potential, potential2, psi;
    std::vector<nlohmann::json> potentials;
    Tolerances tolerances;
    int resolution = 0;  ///< 0 keeps each operation's default
    int period_cap = 0;  ///< 0 keeps each operation's default
    long long enumeration_cap = 0;
    std::string output_dir;
    nlohmann::json options = nlohmann::json::object();  ///< subcommand-specific settings

    /// Rejects unknown keys, non-positive tolerances and resolutions that are not powers of two.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;
    std::map<std::string, std::string> files;  ///< extra outputs, file name -> contents
    double wall_seconds = 0.0;
};

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand. Errors propagate as rigidlab::Error.
RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg);

/// Writes report.json, timings.json and extra files into dir.
void write_outputs(const RunResult& result, const std::string& subcommand, const std::string& dir);

/// Report for a failed run, carrying the error type and message.
nlohmann::json error_report(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& error,
                            const std::string& message, int exit_code);

}  // namespace rigidlab
