#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evorl/scenarios.hpp"

namespace evorl {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Reads and validates a JSON config. Unknown keys, type mismatches and
/// invariant violations raise ConfigError naming the field; missing or
/// unreadable files and malformed JSON raise ConfigError on "config".
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_json(const nlohmann::json& doc);

/// Fully resolved config, suitable for parse_config_json.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

struct SummaryRow {
  std::size_t step = 0;
  std::vector<double> mean;
  std::vector<double> standard_error;
};

struct SummaryTable {
  std::string step_label;
  std::vector<std::string> observables;
  std::size_t replicates = 0;
  /// False when replicates == 1; standard errors are then reported as 0.
  bool standard_error_defined = false;
  std::vector<SummaryRow> rows;
};

/// Across-replicate mean and standard error per step and observable.
/// Throws DomainError on an empty set or ragged step counts.
SummaryTable summarize(const TrajectorySet& trajectories);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

std::string trajectories_csv(const TrajectorySet& trajectories);
std::string summary_csv(const SummaryTable& summary);
/// Cooperation only: replicate, state, greedy move per learner state.
std::string policies_csv(const TrajectorySet& trajectories);

struct RunManifest {
  ScenarioConfig config;
  std::string version = kEngineVersion;
  std::string started_at;
  std::optional<std::string> finished_at;
  std::map<std::string, std::string> outputs;
  std::string status = "running";
  std::optional<std::string> error;
  std::vector<std::string> cleaned_up;
  std::vector<std::pair<std::size_t, std::uint64_t>> extinctions;

  nlohmann::json to_json() const;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Writes manifest.json (before and after the run), trajectories.csv,
/// summary.csv and, for cooperation, policies.csv into out_dir. On I/O failure
/// the data files written so far are removed, the manifest records the
/// failure, and the exception propagates.
RunManifest run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                const RunOptions& options = {});

}  // namespace evorl
