#pragma once

// Run manifests: one JSON file per experiment run.
//
//   {
//     "experiment": "engine",
//     "output_dir": "runs/slow-w2",          (optional)
//     "parameters": { "omega": 2, ... }
//   }
//
// Unknown keys at any level are rejected.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ottosim/protocols.hpp"

namespace ottosim::cli {

/// Missing file, malformed JSON or an invalid parameter. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { adiabaticity, equilibrate, engine, benchmark };

std::string to_string(Experiment experiment);
std::optional<Experiment> parse_experiment(std::string_view name);

struct EquilibrateParameters {
  BathSequenceConfig sequence;
  double scan_min = 0.5;
  double scan_max = 6.0;
  double scan_step = 0.05;
};

using Parameters = std::variant<AdiabaticityGrid, EquilibrateParameters, EngineConfig, BenchmarkConfig>;

struct RunManifest {
  Experiment experiment;
  Parameters parameters;
  /// Parameters with every default filled in, echoed into summary.json.
  nlohmann::json normalized;
  std::optional<std::filesystem::path> output_dir;
};

RunManifest parse_manifest(const std::filesystem::path& path);
RunManifest parse_manifest_text(std::string_view text);

}  // namespace ottosim::cli
