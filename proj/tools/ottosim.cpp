#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ottosim/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Otto engine simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  for (const char* name : {"adiabaticity", "equilibrate", "engine", "benchmark"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON run manifest")->required();
    sub->add_option("--out", out_dir, "Output directory (default: the manifest's output_dir, else ./<experiment>)");
    sub->add_option("--threads", threads, "Worker threads across independent runs")->check(CLI::Range(1, 1024));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const ottosim::cli::RunManifest manifest = ottosim::cli::parse_manifest(config_path);
    if (ottosim::cli::to_string(manifest.experiment) != command) {
      throw ottosim::cli::ConfigError("experiment: manifest declares '" + ottosim::cli::to_string(manifest.experiment) +
                                      "' but the command is '" + command + "'");
    }
    ottosim::cli::RunOptions options;
    options.threads = threads;
    if (!out_dir.empty()) {
      options.out_dir = out_dir;
    } else if (manifest.output_dir) {
      options.out_dir = *manifest.output_dir;
    } else {
      options.out_dir = command;
    }
    const ottosim::cli::RunOutputs outputs = ottosim::cli::run(manifest, options);
    for (const auto& path : outputs.files) std::cout << path.string() << "\n";
    return 0;
  } catch (const ottosim::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ottosim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
