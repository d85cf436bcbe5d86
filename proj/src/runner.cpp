#include "ottosim/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ottosim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

struct Table {
  std::string name;
  std::string text;
};

class CsvBuilder {
 public:
  explicit CsvBuilder(std::string header) : text_(std::move(header) + "\n") {}

  CsvBuilder& cell(double x) { return raw(format_number(x)); }
  CsvBuilder& cell(int x) { return raw(std::to_string(x)); }
  CsvBuilder& cell(const std::string& s) { return raw(s); }
  void end_row() {
    text_ += '\n';
    first_ = true;
  }
  std::string take() { return std::move(text_); }

 private:
  CsvBuilder& raw(const std::string& s) {
    if (!first_) text_ += ',';
    text_ += s;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

std::vector<Table> engine_tables(const EngineConfig& config, json& results) {
  const EngineRun run = run_engine(config);
  CsvBuilder csv("cycle,e_expanded_cold,e_compressed_cold,e_compressed_hot,e_expanded_hot,work,heat_in,efficiency,power");
  for (const CycleRecord& c : run.cycles) {
    csv.cell(c.cycle_index).cell(c.e_expanded_cold).cell(c.e_compressed_cold).cell(c.e_compressed_hot);
    csv.cell(c.e_expanded_hot).cell(c.work).cell(c.heat_in).cell(c.efficiency).cell(c.power);
    csv.end_row();
  }
  const SteadyState s = steady_state(run.cycles);
  results = {{"steady_state_efficiency", s.efficiency},
             {"steady_state_power", s.power},
             {"steady_state_work", s.work},
             {"steady_state_heat_in", s.heat_in},
             {"otto_efficiency", 1.0 - 1.0 / config.omega},
             {"final_cycle_change", run.cycle_change.empty() ? 0.0 : run.cycle_change.back()},
             {"compression_unitarity_defect", run.compression_defect},
             {"hot_contact_unitarity_defect", run.hot_contact_defect},
             {"cold_contact_unitarity_defect", run.cold_contact_defect},
             {"max_hermiticity_defect", run.health.max_hermiticity},
             {"max_trace_error", run.health.max_trace_error},
             {"min_eigenvalue", run.health.min_eigenvalue},
             {"max_stroke_trace_loss", run.health.max_trace_loss}};
  return {{"cycles.csv", csv.take()}};
}

std::vector<Table> equilibrate_tables(const EquilibrateParameters& p, json& results) {
  const EquilibrationResult run = run_equilibration(p.sequence);
  CsvBuilder series("tau,bath,step,phi0,distance");
  for (const EquilibrationPoint& e : run.series) {
    series.cell(e.tau).cell(e.bath).cell(e.step).cell(e.phi0).cell(e.distance);
    series.end_row();
  }
  const ThermalScan scan =
      thermal_distance_scan(run.final_gas, p.sequence.alpha, uniform_grid(p.scan_min, p.scan_max, p.scan_step));
  CsvBuilder table("omega_T,distance");
  for (std::size_t i = 0; i < scan.omega_Ts.size(); ++i) {
    table.cell(scan.omega_Ts[i]).cell(scan.distances[i]);
    table.end_row();
  }
  results = {{"final_distance", run.series.empty() ? 0.0 : run.series.back().distance},
             {"scan_argmin_omega_T", scan.argmin},
             {"scan_min_distance", scan.min_distance},
             {"max_unitarity_defect", run.max_unitarity_defect}};
  return {{"equilibration.csv", series.take()}, {"thermal_scan.csv", table.take()}};
}

std::vector<Table> adiabaticity_tables(const AdiabaticityGrid& grid, int threads, json& results) {
  const std::vector<AdiabaticityCell> cells = run_adiabaticity_sweep(grid, threads);
  CsvBuilder csv("direction,omega_T,omega,tau_alpha,ratio,final_energy,adiabatic_energy,unitarity_defect,trace_loss");
  double lo = 0.0, hi = 0.0, worst = 0.0, loss = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const AdiabaticityCell& c = cells[i];
    csv.cell(to_string(c.direction)).cell(c.omega_T).cell(c.omega).cell(c.tau_alpha);
    csv.cell(c.result.ratio).cell(c.result.final_energy).cell(c.result.adiabatic_energy).cell(c.result.unitarity_defect).cell(c.result.trace_loss);
    csv.end_row();
    lo = i == 0 ? c.result.ratio : std::min(lo, c.result.ratio);
    hi = i == 0 ? c.result.ratio : std::max(hi, c.result.ratio);
    worst = std::max(worst, c.result.unitarity_defect);
    loss = std::max(loss, c.result.trace_loss);
  }
  results = {{"cells", cells.size()}, {"min_ratio", lo}, {"max_ratio", hi}, {"max_unitarity_defect", worst}, {"max_trace_loss", loss}};
  return {{"adiabaticity.csv", csv.take()}};
}

std::vector<Table> benchmark_tables(const BenchmarkConfig& config, int threads, json& results) {
  const BenchmarkResult run = run_benchmark(config, threads);
  CsvBuilder csv("mode,alpha,divisor,error");
  for (const BenchmarkRow& r : run.rows) {
    csv.cell(to_string(r.mode)).cell(r.alpha).cell(r.divisor).cell(r.error);
    csv.end_row();
  }
  json slopes = json::array();
  for (const BenchmarkSeries& s : run.series) {
    slopes.push_back({{"mode", to_string(s.mode)}, {"alpha", s.alpha}, {"slope", s.slope}});
  }
  results = {{"slopes", slopes}};
  return {{"convergence.csv", csv.take()}};
}

void remove_all(const std::vector<fs::path>& files) {
  std::error_code ignored;
  for (const fs::path& f : files) fs::remove(f, ignored);
}

}  // namespace

RunOutputs run(const RunManifest& manifest, const RunOptions& options) {
  json results;
  std::vector<Table> tables = std::visit(
      [&](const auto& p) -> std::vector<Table> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EngineConfig>) return engine_tables(p, results);
        if constexpr (std::is_same_v<T, EquilibrateParameters>) return equilibrate_tables(p, results);
        if constexpr (std::is_same_v<T, AdiabaticityGrid>) return adiabaticity_tables(p, options.threads, results);
        if constexpr (std::is_same_v<T, BenchmarkConfig>) return benchmark_tables(p, options.threads, results);
      },
      manifest.parameters);

  RunOutputs out;
  out.summary = {{"experiment", to_string(manifest.experiment)},
                 {"parameters", manifest.normalized},
                 {"results", results}};
  tables.push_back({"summary.json", out.summary.dump(2) + "\n"});

  try {
    fs::create_directories(options.out_dir);
    for (const Table& t : tables) {
      const fs::path path = options.out_dir / t.name;
      out.files.push_back(path);
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      file << t.text;
      file.close();
      if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
    }
  } catch (...) {
    remove_all(out.files);
    throw;
  }
  return out;
}

}  // namespace ottosim::cli
