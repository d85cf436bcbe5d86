#pragma once

// The four numerical experiments: adiabaticity of finite-time strokes,
// equilibration against a sequence of baths, full engine cycles, and the
// step-size convergence benchmark of the RK5 integrator.

#include <optional>
#include <string>
#include <vector>

#include "ottosim/fock.hpp"
#include "ottosim/hamiltonians.hpp"
#include "ottosim/propagators.hpp"

namespace ottosim {

// ---------------------------------------------------------------------------
// Adiabaticity

enum class StrokeDirection { compression, expansion };
std::string to_string(StrokeDirection direction);

struct AdiabaticityResult {
  double final_energy = 0.0;      ///< tr[H_f U rho_i U^dag]
  double adiabatic_energy = 0.0;  ///< populations of rho_i carried onto H_f's eigenlevels
  double ratio = 1.0;
  double unitarity_defect = 0.0;
  double trace_loss = 0.0;  ///< |tr(U rho_i U^dag) - 1|, divided out before E_f
};

/// Prepares the thermal state of the initial Hamiltonian (alpha = 0 for a
/// compression, omega^2 - 1 for an expansion), ramps alpha linearly over
/// tau_alpha with the RK5 propagator and compares the final energy with the
/// adiabatic one, sum_n p_n E_n(H_f) with populations sorted descending and
/// levels ascending.
AdiabaticityResult adiabaticity(double omega, double tau_alpha, Temperature temperature, int n_levels,
                                StrokeDirection direction, double step_divisor = 5.0);

/// Convenience wrapper returning E_f / E_f^A.
double adiabaticity_ratio(double omega, double tau_alpha, Temperature temperature, int n_levels,
                          StrokeDirection direction, double step_divisor = 5.0);

struct AdiabaticityGrid {
  std::vector<double> omegas;
  std::vector<double> tau_alphas;
  std::vector<double> omega_Ts;
  std::vector<StrokeDirection> directions{StrokeDirection::compression, StrokeDirection::expansion};
  int n_levels = 41;
  double step_divisor = 5.0;

  /// omega in {1.25, 1.5, ..., 3}, tau_alpha in {0.25, 0.5, 1, 2, 4, 8}, omega_T in {1/10, 5}.
  static AdiabaticityGrid defaults();
  void validate() const;
};

struct AdiabaticityCell {
  StrokeDirection direction;
  double omega_T;
  double omega;
  double tau_alpha;
  AdiabaticityResult result;
};

/// One row per (direction, omega_T, omega, tau_alpha) in that nesting order.
/// A propagator is shared by all temperatures of its (direction, omega, tau)
/// column; columns run on up to `threads` workers.
std::vector<AdiabaticityCell> run_adiabaticity_sweep(const AdiabaticityGrid& grid, int threads = 1);

// ---------------------------------------------------------------------------
// Equilibration

struct BathSegment {
  double phi0;
  int n_baths;
  int n_steps;
  double dtau;
};

struct BathSequenceConfig {
  /// Five baths at phi0 = 1, four at 1/5, three at 1/20; ten steps of 5 each.
  std::vector<BathSegment> segments{{1.0, 5, 10, 5.0}, {0.2, 4, 10, 5.0}, {0.05, 3, 10, 5.0}};
  double alpha = 0.0;
  Temperature omega_T_gas_initial{1.0};
  Temperature omega_T_bath{5.0};
  int n_levels = 41;
  double sigma = 1.0;
  double x0 = 1.0;

  void validate() const;
};

struct EquilibrationPoint {
  double tau;
  int bath;  ///< 0-based bath index
  int step;  ///< applications of U(dtau) within this contact, 0 = contact start
  double phi0;
  double distance;
};

struct EquilibrationResult {
  std::vector<EquilibrationPoint> series;
  DensityOperator final_gas;
  DensityOperator bath_state;
  double max_unitarity_defect = 0.0;
};

/// Couples the gas to each bath in turn, recording D(tr_b rho_total, rho_bath)
/// at contact start and after every application of the exact contact propagator.
EquilibrationResult run_equilibration(const BathSequenceConfig& config);

struct ThermalScan {
  std::vector<double> omega_Ts;
  std::vector<double> distances;
  double argmin = 0.0;
  double min_distance = 0.0;
};

/// Trace distance between `state` and the thermal states of gas_hamiltonian(alpha)
/// at each temperature of the grid.
ThermalScan thermal_distance_scan(const DensityOperator& state, double alpha, const std::vector<double>& omega_T_grid);

/// Uniform grid lo, lo + step, ..., up to hi inclusive (within round-off).
std::vector<double> uniform_grid(double lo, double hi, double step);

// ---------------------------------------------------------------------------
// Engine

struct EngineConfig {
  double omega = 2.0;
  double tau_stroke = 4.0;
  double tau_contact = 10.0;
  Temperature omega_T_hot{5.0};
  Temperature omega_T_cold{0.1};
  int n_levels = 41;
  CouplingSpec coupling{1.0, 1.0, 1.0};
  int n_cycles = 50;
  double step_divisor = 5.0;

  double alpha_max() const { return alpha_for_frequency_ratio(omega); }
  void validate() const;
};

struct CycleRecord {
  int cycle_index = 0;  ///< 1-based
  double e_expanded_cold = 0.0;
  double e_compressed_cold = 0.0;
  double e_compressed_hot = 0.0;
  double e_expanded_hot = 0.0;
  double work = 0.0;
  double heat_in = 0.0;
  double efficiency = 0.0;
  double power = 0.0;
};

/// Fills work, heat_in, efficiency and power from the four stroke energies.
void complete_ledger(CycleRecord& record, double cycle_duration);

/// Worst invariant defects seen over all strokes of a run.
struct StrokeHealth {
  double max_hermiticity = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  /// Largest trace change divided out after a stroke propagator.
  double max_trace_loss = 0.0;
};

struct EngineRun {
  std::vector<CycleRecord> cycles;
  /// D(rho_n, rho_{n+1}) between successive cycle-start gas states.
  std::vector<double> cycle_change;
  StrokeHealth health;
  double compression_defect = 0.0;
  double hot_contact_defect = 0.0;
  double cold_contact_defect = 0.0;
};

/// Runs n_cycles Otto cycles from the thermal state at omega_T_cold, alpha = 0.
/// A density-operator invariant violation aborts with NumericalError naming the
/// cycle.
EngineRun run_engine(const EngineConfig& config);

struct SteadyState {
  double efficiency = 0.0;
  double power = 0.0;
  double work = 0.0;
  double heat_in = 0.0;
};

/// Means over the last `window` cycles.
SteadyState steady_state(const std::vector<CycleRecord>& cycles, int window = 10);

// ---------------------------------------------------------------------------
// Convergence benchmark

enum class BenchmarkMode { fixed, ramp };
std::string to_string(BenchmarkMode mode);

struct BenchmarkConfig {
  int n_levels = 101;
  Temperature omega_T{5.0};
  std::vector<double> alpha_targets{3.0, 8.0};
  double tau_final = 5.0;
  std::vector<double> divisors{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  std::vector<BenchmarkMode> modes{BenchmarkMode::fixed, BenchmarkMode::ramp};

  void validate() const;
};

struct BenchmarkRow {
  BenchmarkMode mode;
  double alpha;
  double divisor;
  double error;
  double unitarity_defect;
};

struct BenchmarkSeries {
  BenchmarkMode mode;
  double alpha;
  double slope;  ///< least-squares d log(error) / d log(dtau), finest row excluded
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkSeries> series;
};

/// Evolves the thermal state of g^dag g + 1/2 at omega_T for tau_final with
/// alpha held at the target (fixed) or ramped linearly to it (ramp), at every
/// divisor; the error of each run is its trace distance to the finest-step run.
BenchmarkResult run_benchmark(const BenchmarkConfig& config, int threads = 1);

/// Least-squares slope of log(error) against log(dtau) over rows with error > 0.
double fit_log_slope(const std::vector<double>& dtaus, const std::vector<double>& errors);

}  // namespace ottosim
