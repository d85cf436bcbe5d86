#include "ottosim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "parallel.hpp"
#include "ottosim/spectrum.hpp"

namespace ottosim {

std::string to_string(StrokeDirection direction) {
  return direction == StrokeDirection::compression ? "compression" : "expansion";
}

std::string to_string(BenchmarkMode mode) { return mode == BenchmarkMode::fixed ? "fixed" : "ramp"; }

namespace {

StiffnessSchedule stroke_schedule(double omega, double tau_alpha, StrokeDirection direction) {
  return direction == StrokeDirection::compression ? StiffnessSchedule::compression(omega, tau_alpha)
                                                   : StiffnessSchedule::expansion(omega, tau_alpha);
}

// sum_n p_n E_n with populations descending and levels ascending: the energy a
// state keeps when every eigenstate is carried adiabatically onto the final levels.
double adiabatic_energy(const DensityOperator& initial, const ModeOperator& final_hamiltonian) {
  RealVector populations = initial.eigenvalues();  // ascending
  const RealVector levels = hermitian_eigenvalues(final_hamiltonian.matrix());
  const Index n = populations.size();
  double e = 0.0;
  for (Index k = 0; k < n; ++k) e += populations(n - 1 - k) * levels(k);
  return e;
}

// A stroke whose stiffness never changes has a time-independent Hamiltonian
// and is exponentiated exactly.
Propagator stroke_propagator(const StiffnessSchedule& schedule, const FockBasis& basis, const StepRule& rule) {
  if (schedule.alpha_start == schedule.alpha_end) {
    return exact_propagator(gas_hamiltonian(basis, schedule.alpha_start), schedule.tau_alpha);
  }
  return rk5_propagator(schedule, basis, rule);
}

AdiabaticityResult adiabaticity_with(const Propagator& u, double omega, Temperature temperature,
                                     const FockBasis& basis, StrokeDirection direction) {
  const double alpha_max = alpha_for_frequency_ratio(omega);
  const bool compress = direction == StrokeDirection::compression;
  const ModeOperator h_initial = gas_hamiltonian(basis, compress ? 0.0 : alpha_max);
  const ModeOperator h_final = gas_hamiltonian(basis, compress ? alpha_max : 0.0);
  const DensityOperator rho_i = thermal_state(h_initial, temperature);

  AdiabaticityResult r;
  r.final_energy = energy(u.evolve(rho_i, &r.trace_loss), h_final);
  r.adiabatic_energy = adiabatic_energy(rho_i, h_final);
  r.ratio = r.final_energy / r.adiabatic_energy;
  r.unitarity_defect = u.unitarity_defect();
  return r;
}

void require_omega(double omega) {
  if (!(omega >= 1.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be >= 1");
}

}  // namespace

AdiabaticityResult adiabaticity(double omega, double tau_alpha, Temperature temperature, int n_levels,
                                StrokeDirection direction, double step_divisor) {
  require_omega(omega);
  const FockBasis basis(n_levels);
  const StiffnessSchedule schedule = stroke_schedule(omega, tau_alpha, direction);
  const StepRule rule{n_levels, schedule.alpha_max(), step_divisor};
  return adiabaticity_with(stroke_propagator(schedule, basis, rule), omega, temperature, basis, direction);
}

double adiabaticity_ratio(double omega, double tau_alpha, Temperature temperature, int n_levels,
                          StrokeDirection direction, double step_divisor) {
  return adiabaticity(omega, tau_alpha, temperature, n_levels, direction, step_divisor).ratio;
}

AdiabaticityGrid AdiabaticityGrid::defaults() {
  AdiabaticityGrid g;
  for (int k = 5; k <= 12; ++k) g.omegas.push_back(0.25 * k);
  g.tau_alphas = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  g.omega_Ts = {0.1, 5.0};
  return g;
}

void AdiabaticityGrid::validate() const {
  if (omegas.empty() || tau_alphas.empty() || omega_Ts.empty() || directions.empty()) {
    throw std::invalid_argument("adiabaticity grid must be non-empty");
  }
  for (double w : omegas) require_omega(w);
  for (double t : tau_alphas) {
    if (!(t > 0.0)) throw std::invalid_argument("tau_alpha must be positive");
  }
  for (double t : omega_Ts) (void)Temperature(t);
  (void)FockBasis(n_levels);
  if (!(step_divisor > 0.0)) throw std::invalid_argument("step_divisor must be positive");
}

std::vector<AdiabaticityCell> run_adiabaticity_sweep(const AdiabaticityGrid& grid, int threads) {
  grid.validate();
  const FockBasis basis(grid.n_levels);
  const std::size_t n_omega = grid.omegas.size();
  const std::size_t n_tau = grid.tau_alphas.size();
  const std::size_t n_temp = grid.omega_Ts.size();
  const std::size_t columns = grid.directions.size() * n_omega * n_tau;

  std::vector<std::optional<AdiabaticityCell>> cells(columns * n_temp);
  auto cell_index = [&](std::size_t d, std::size_t t, std::size_t w, std::size_t a) {
    return ((d * n_temp + t) * n_omega + w) * n_tau + a;
  };

  detail::parallel_for(columns, threads, [&](std::size_t column) {
    const std::size_t d = column / (n_omega * n_tau);
    const std::size_t w = (column / n_tau) % n_omega;
    const std::size_t a = column % n_tau;
    const StrokeDirection direction = grid.directions[d];
    const double omega = grid.omegas[w];
    const double tau = grid.tau_alphas[a];
    const StiffnessSchedule schedule = stroke_schedule(omega, tau, direction);
    const Propagator u = stroke_propagator(schedule, basis, {grid.n_levels, schedule.alpha_max(), grid.step_divisor});
    for (std::size_t t = 0; t < n_temp; ++t) {
      const double omega_T = grid.omega_Ts[t];
      cells[cell_index(d, t, w, a)] =
          AdiabaticityCell{direction, omega_T, omega, tau,
                           adiabaticity_with(u, omega, Temperature(omega_T), basis, direction)};
    }
  });

  std::vector<AdiabaticityCell> out;
  out.reserve(cells.size());
  for (auto& c : cells) out.push_back(std::move(*c));
  return out;
}

// ---------------------------------------------------------------------------

void BathSequenceConfig::validate() const {
  if (segments.empty()) throw std::invalid_argument("bath sequence needs at least one segment");
  for (const BathSegment& s : segments) {
    if (s.n_baths < 1 || s.n_steps < 1) throw std::invalid_argument("segments need n_baths, n_steps >= 1");
    if (!(s.dtau > 0.0)) throw std::invalid_argument("segment dtau must be positive");
    if (!std::isfinite(s.phi0)) throw std::invalid_argument("segment phi0 must be finite");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  (void)FockBasis(n_levels);
  CouplingSpec{1.0, sigma, x0}.validate();
}

EquilibrationResult run_equilibration(const BathSequenceConfig& config) {
  config.validate();
  const FockBasis basis(config.n_levels);
  const ModeOperator h = gas_hamiltonian(basis, config.alpha);
  DensityOperator gas = thermal_state(h, config.omega_T_gas_initial);
  const DensityOperator bath = thermal_state(h, config.omega_T_bath);
  const ModeOperator phi_single = gaussian_coupling_matrix(basis, CouplingSpec{1.0, config.sigma, config.x0});

  std::vector<EquilibrationPoint> series;
  double max_defect = 0.0;
  double tau = 0.0;
  int bath_index = 0;
  for (const BathSegment& segment : config.segments) {
    const HermitianSpectrum spectrum(coupled_hamiltonian(basis, config.alpha, segment.phi0, phi_single).matrix());
    // U(dtau)^n applied to a fresh product state, traced after each n.
    std::vector<ContactChannel> channels;
    channels.reserve(segment.n_steps);
    for (int n = 1; n <= segment.n_steps; ++n) {
      const Propagator u = exact_propagator(spectrum, basis, 2, n * segment.dtau);
      max_defect = std::max(max_defect, u.unitarity_defect());
      channels.emplace_back(u, bath);
    }
    for (int b = 0; b < segment.n_baths; ++b, ++bath_index) {
      series.push_back({tau, bath_index, 0, segment.phi0, trace_distance(gas, bath)});
      std::optional<DensityOperator> latest;
      for (int n = 1; n <= segment.n_steps; ++n) {
        latest = channels[n - 1].apply(gas);
        series.push_back({tau + n * segment.dtau, bath_index, n, segment.phi0, trace_distance(*latest, bath)});
      }
      gas = std::move(*latest);
      tau += segment.n_steps * segment.dtau;
    }
  }
  return EquilibrationResult{std::move(series), std::move(gas), bath, max_defect};
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("uniform_grid: need step > 0 and hi >= lo");
  std::vector<double> grid;
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) grid.push_back(lo + step * static_cast<double>(k));
  return grid;
}

ThermalScan thermal_distance_scan(const DensityOperator& state, double alpha, const std::vector<double>& omega_T_grid) {
  if (omega_T_grid.empty()) throw std::invalid_argument("thermal scan grid is empty");
  const ModeOperator h = gas_hamiltonian(state.basis(), alpha);
  ThermalScan scan;
  scan.omega_Ts = omega_T_grid;
  scan.distances.reserve(omega_T_grid.size());
  for (double t : omega_T_grid) scan.distances.push_back(trace_distance(state, thermal_state(h, Temperature(t))));
  const auto best = std::min_element(scan.distances.begin(), scan.distances.end());
  scan.argmin = omega_T_grid[static_cast<std::size_t>(best - scan.distances.begin())];
  scan.min_distance = *best;
  return scan;
}

// ---------------------------------------------------------------------------

void EngineConfig::validate() const {
  if (!(omega > 1.0) || !std::isfinite(omega)) throw std::invalid_argument("engine omega must be > 1");
  if (!(tau_stroke > 0.0)) throw std::invalid_argument("tau_stroke must be positive");
  if (!(tau_contact > 0.0)) throw std::invalid_argument("tau_contact must be positive");
  (void)FockBasis(n_levels);
  coupling.validate();
  if (n_cycles < 1) throw std::invalid_argument("n_cycles must be >= 1");
  if (!(step_divisor > 0.0)) throw std::invalid_argument("step_divisor must be positive");
}

void complete_ledger(CycleRecord& r, double cycle_duration) {
  r.work = -((r.e_expanded_hot - r.e_compressed_hot) + (r.e_compressed_cold - r.e_expanded_cold));
  r.heat_in = r.e_compressed_hot - r.e_compressed_cold;
  r.efficiency = r.work / r.heat_in;
  r.power = r.work / cycle_duration;
}

namespace {

void track(StrokeHealth& health, const DensityOperator& rho) {
  const StateDefects d = measure_state_defects(rho.matrix());
  health.max_hermiticity = std::max(health.max_hermiticity, d.hermiticity);
  health.max_trace_error = std::max(health.max_trace_error, d.trace_error);
  health.min_eigenvalue = std::min(health.min_eigenvalue, d.min_eigenvalue);
}

}  // namespace

EngineRun run_engine(const EngineConfig& config) {
  config.validate();
  const FockBasis basis(config.n_levels);
  const double alpha_max = config.alpha_max();
  const ModeOperator h_expanded = gas_hamiltonian(basis, 0.0);
  const ModeOperator h_compressed = gas_hamiltonian(basis, alpha_max);

  const Propagator compression = rk5_propagator(StiffnessSchedule::compression(config.omega, config.tau_stroke),
                                                basis, {config.n_levels, alpha_max, config.step_divisor});
  const ModeOperator phi_single = gaussian_coupling_matrix(basis, config.coupling);
  const DensityOperator rho_hot = thermal_state(h_compressed, config.omega_T_hot);
  const DensityOperator rho_cold = thermal_state(h_expanded, config.omega_T_cold);
  const ContactChannel hot(
      exact_propagator(coupled_hamiltonian(basis, alpha_max, config.coupling.phi0, phi_single), config.tau_contact),
      rho_hot);
  const ContactChannel cold(
      exact_propagator(coupled_hamiltonian(basis, 0.0, config.coupling.phi0, phi_single), config.tau_contact),
      rho_cold);

  EngineRun run;
  run.compression_defect = compression.unitarity_defect();
  run.hot_contact_defect = hot.unitarity_defect();
  run.cold_contact_defect = cold.unitarity_defect();
  const double cycle_duration = 2.0 * config.tau_stroke + 2.0 * config.tau_contact;

  DensityOperator gas = thermal_state(h_expanded, config.omega_T_cold);
  track(run.health, gas);
  for (int cycle = 1; cycle <= config.n_cycles; ++cycle) {
    CycleRecord record;
    record.cycle_index = cycle;
    try {
      record.e_expanded_cold = energy(gas, h_expanded);
      double loss = 0.0;
      const DensityOperator compressed = compression.evolve(gas, &loss);
      run.health.max_trace_loss = std::max(run.health.max_trace_loss, loss);
      track(run.health, compressed);
      record.e_compressed_cold = energy(compressed, h_compressed);
      const DensityOperator heated = hot.apply(compressed);
      track(run.health, heated);
      record.e_compressed_hot = energy(heated, h_compressed);
      const DensityOperator expanded = compression.evolve_reversed(heated, &loss);
      run.health.max_trace_loss = std::max(run.health.max_trace_loss, loss);
      track(run.health, expanded);
      record.e_expanded_hot = energy(expanded, h_expanded);
      DensityOperator cooled = cold.apply(expanded);
      track(run.health, cooled);
      run.cycle_change.push_back(trace_distance(gas, cooled));
      gas = std::move(cooled);
    } catch (const NumericalError& e) {
      throw NumericalError("engine cycle " + std::to_string(cycle) + ": " + e.what());
    }
    complete_ledger(record, cycle_duration);
    run.cycles.push_back(record);
  }
  return run;
}

SteadyState steady_state(const std::vector<CycleRecord>& cycles, int window) {
  if (cycles.empty()) throw std::invalid_argument("steady_state: no cycles");
  const std::size_t count = std::min(cycles.size(), static_cast<std::size_t>(std::max(1, window)));
  SteadyState s;
  for (std::size_t i = cycles.size() - count; i < cycles.size(); ++i) {
    s.efficiency += cycles[i].efficiency;
    s.power += cycles[i].power;
    s.work += cycles[i].work;
    s.heat_in += cycles[i].heat_in;
  }
  const double inv = 1.0 / static_cast<double>(count);
  s.efficiency *= inv;
  s.power *= inv;
  s.work *= inv;
  s.heat_in *= inv;
  return s;
}

// ---------------------------------------------------------------------------

void BenchmarkConfig::validate() const {
  (void)FockBasis(n_levels);
  if (alpha_targets.empty() || divisors.size() < 2 || modes.empty()) {
    throw std::invalid_argument("benchmark needs alpha targets, modes and at least two divisors");
  }
  for (double a : alpha_targets) {
    if (!(a >= 0.0)) throw std::invalid_argument("benchmark alpha must be >= 0");
  }
  for (double d : divisors) {
    if (!(d > 0.0)) throw std::invalid_argument("benchmark divisors must be positive");
  }
  const auto [lo, hi] = std::minmax_element(divisors.begin(), divisors.end());
  if (*lo > 3.0 || *hi < 16.0) throw std::invalid_argument("benchmark divisors must span at least [3, 16]");
  if (!(tau_final > 0.0)) throw std::invalid_argument("tau_final must be positive");
}

double fit_log_slope(const std::vector<double>& dtaus, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < dtaus.size(); ++i) {
    if (!(errors[i] > 0.0)) continue;
    const double x = std::log(dtaus[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("fit_log_slope: need two positive errors");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, int threads) {
  config.validate();
  const FockBasis basis(config.n_levels);
  const DensityOperator rho0 = thermal_state(gas_hamiltonian(basis, 0.0), config.omega_T);

  struct Task {
    BenchmarkMode mode;
    double alpha;
    double divisor;
  };
  std::vector<Task> tasks;
  for (BenchmarkMode mode : config.modes) {
    for (double alpha : config.alpha_targets) {
      for (double divisor : config.divisors) tasks.push_back({mode, alpha, divisor});
    }
  }

  struct Outcome {
    Matrix rho;
    double dtau = 0.0;
    double defect = 0.0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  detail::parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    const StiffnessSchedule schedule{t.mode == BenchmarkMode::fixed ? t.alpha : 0.0, t.alpha, config.tau_final};
    // Integrated directly: the coarse end of the range is meant to show large errors.
    const Rk5Integration run = integrate_rk5(schedule, basis, {config.n_levels, t.alpha, t.divisor});
    Matrix rho = run.matrix * rho0.matrix() * run.matrix.adjoint();
    outcomes[i] = {0.5 * (rho + rho.adjoint()), run.dtau, unitarity_defect(run.matrix)};
  });

  BenchmarkResult result;
  const std::size_t per_series = config.divisors.size();
  for (std::size_t start = 0; start < tasks.size(); start += per_series) {
    std::size_t finest = start;
    for (std::size_t i = start; i < start + per_series; ++i) {
      if (outcomes[i].dtau < outcomes[finest].dtau) finest = i;
    }
    std::vector<double> dtaus, errors;
    for (std::size_t i = start; i < start + per_series; ++i) {
      const Matrix diff = outcomes[i].rho - outcomes[finest].rho;
      const double error = i == finest ? 0.0 : 0.5 * hermitian_eigenvalues(diff).cwiseAbs().sum();
      result.rows.push_back({tasks[i].mode, tasks[i].alpha, tasks[i].divisor, error, outcomes[i].defect});
      dtaus.push_back(outcomes[i].dtau);
      errors.push_back(error);
    }
    result.series.push_back({tasks[start].mode, tasks[start].alpha, fit_log_slope(dtaus, errors)});
  }
  return result;
}

}  // namespace ottosim
