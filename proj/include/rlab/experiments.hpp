#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rlab::cli {

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::string output_path;
  std::optional<std::uint64_t> seed;
};

/// Parses {"experiment":..., "output":..., "seed":..., "params":{...}} with
/// strict key checking at the top level.
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Diagnostics {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<std::string> conventions;  // every applied convention default
};

std::vector<std::string> experiment_names();

/// Schema and parameter-range checks without execution. Unknown keys are
/// errors (strict parsing); every convention default in play is echoed.
Diagnostics validate(const ExperimentConfig& cfg);

/// Runs the experiment, writing the CSV to cfg.output_path and a metadata
/// sidecar next to it (.meta.json). Throws ValidationError / NumericError.
void run(const ExperimentConfig& cfg);

/// "out.csv" -> "out.meta.json"; no extension -> append ".meta.json".
std::string metadata_path_for(const std::string& csv_path);

}  // namespace rlab::cli
