#pragma once

// Experiment dispatch and deterministic CSV/JSON output.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ottosim/manifest.hpp"

namespace ottosim::cli {

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
};

struct RunOutputs {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// Runs the experiment, then writes its CSV tables and summary.json into
/// options.out_dir. Nothing is written if the protocol throws; files already
/// written are removed if a later write fails.
RunOutputs run(const RunManifest& manifest, const RunOptions& options);

/// 17 significant digits, the form used for every CSV number.
std::string format_number(double value);

}  // namespace ottosim::cli
