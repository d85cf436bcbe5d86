#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ottosim/protocols.hpp"
#include "ottosim/spectrum.hpp"
#include "support.hpp"

using namespace ottosim;
using testing::max_abs;

TEST_CASE("ratio is one when the stiffness never changes") {
  for (double t : {0.25, 4.0}) {
    for (StrokeDirection d : {StrokeDirection::compression, StrokeDirection::expansion}) {
      const AdiabaticityResult r = adiabaticity(1.0, t, Temperature(2.0), 21, d);
      CHECK(std::abs(r.ratio - 1.0) < 1e-12);
    }
  }
  CHECK_THROWS_AS(adiabaticity_ratio(0.9, 1.0, Temperature(1.0), 21, StrokeDirection::compression), std::invalid_argument);
}

TEST_CASE("slow cold compression is adiabatic") {
  const AdiabaticityResult r = adiabaticity(2.0, 8.0, Temperature(0.1), 41, StrokeDirection::compression);
  CHECK(std::abs(r.ratio - 1.0) < 1e-3);

  // Reference built here: populations of the initial thermal state carried
  // level by level onto the final spectrum.
  const FockBasis b(41);
  const RealVector e0 = hermitian_eigenvalues(gas_hamiltonian(b, 0.0).matrix());
  const RealVector e1 = hermitian_eigenvalues(gas_hamiltonian(b, 3.0).matrix());
  double z = 0, ea = 0;
  for (int k = 0; k < 41; ++k) z += std::exp(-(e0(k) - e0(0)) / 0.1);
  for (int k = 0; k < 41; ++k) ea += std::exp(-(e0(k) - e0(0)) / 0.1) / z * e1(k);
  CHECK(r.adiabatic_energy == doctest::Approx(ea).epsilon(1e-12));
  CHECK(r.final_energy >= ea);
}

TEST_CASE("cold fast compression is insensitive to the basis size") {
  const double r41 = adiabaticity_ratio(3.0, 1.0, Temperature(0.1), 41, StrokeDirection::compression);
  const double r21 = adiabaticity_ratio(3.0, 1.0, Temperature(0.1), 21, StrokeDirection::compression);
  CHECK(std::abs(r41 - r21) < 1e-4);
  CHECK(r41 > 1.0);
}

TEST_CASE("sweep layout and monotonicity on a small grid") {
  AdiabaticityGrid g;
  g.omegas = {1.5, 2.0, 2.5};
  g.tau_alphas = {0.25, 1.0};
  g.omega_Ts = {0.1};
  g.n_levels = 15;
  const auto cells = run_adiabaticity_sweep(g, 2);
  REQUIRE(cells.size() == 2 * 3 * 2);
  CHECK(cells[0].direction == StrokeDirection::compression);
  CHECK(cells[0].omega == 1.5);
  CHECK(cells[1].tau_alpha == 1.0);
  CHECK(cells[2].omega == 2.0);
  CHECK(cells[6].direction == StrokeDirection::expansion);
  for (const auto& c : cells) CHECK(c.result.ratio >= 1.0 - 1e-8);
  // fixed tau = 0.25: ratio grows with omega
  CHECK(cells[0].result.ratio < cells[2].result.ratio);
  CHECK(cells[2].result.ratio < cells[4].result.ratio);

  const auto serial = run_adiabaticity_sweep(g, 1);
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(cells[i].result.ratio == serial[i].result.ratio);

  g.omegas.clear();
  CHECK_THROWS_AS(run_adiabaticity_sweep(g), std::invalid_argument);
}

TEST_CASE("default grid") {
  const AdiabaticityGrid g = AdiabaticityGrid::defaults();
  CHECK(g.omegas.size() == 8);
  CHECK(g.omegas.front() == 1.25);
  CHECK(g.omegas.back() == 3.0);
  CHECK(g.tau_alphas.front() == 0.25);
  CHECK(g.tau_alphas.back() == 8.0);
  CHECK(g.n_levels == 41);
}

TEST_CASE("thermal distance scan finds an exact thermal state") {
  const FockBasis b(30);
  const DensityOperator rho = thermal_state(gas_hamiltonian(b, 8.0), Temperature(2.0));
  const ThermalScan s = thermal_distance_scan(rho, 8.0, uniform_grid(0.5, 6.0, 0.05));
  CHECK(s.argmin == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.min_distance < 1e-10);
  const auto at = std::min_element(s.distances.begin(), s.distances.end()) - s.distances.begin();
  for (std::size_t i = 1; i < s.distances.size(); ++i) {
    if (static_cast<long>(i) <= at) CHECK(s.distances[i] < s.distances[i - 1]);
    else CHECK(s.distances[i] > s.distances[i - 1]);
  }
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(0.5, 6.0, 0.05);
  CHECK(g.size() == 111);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(g[30] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("equilibration series on a small basis") {
  BathSequenceConfig c;
  c.n_levels = 10;
  c.segments = {{1.0, 2, 3, 5.0}, {0.2, 1, 2, 5.0}};
  c.alpha = 3.0;
  c.omega_T_gas_initial = Temperature(1.0);
  c.omega_T_bath = Temperature(2.0);
  const EquilibrationResult r = run_equilibration(c);
  REQUIRE(r.series.size() == 2 * 4 + 3);
  const FockBasis b(10);
  const DensityOperator g0 = thermal_state(gas_hamiltonian(b, 3.0), Temperature(1.0));
  const DensityOperator bath = thermal_state(gas_hamiltonian(b, 3.0), Temperature(2.0));
  CHECK(r.series[0].distance == doctest::Approx(trace_distance(g0, bath)).epsilon(1e-14));
  CHECK(r.series[0].tau == 0.0);
  CHECK(r.series[0].step == 0);
  CHECK(r.series[3].step == 3);
  CHECK(r.series[3].tau == doctest::Approx(15.0));
  CHECK(r.series[4].bath == 1);
  CHECK(r.series[4].step == 0);
  CHECK(r.series[4].tau == doctest::Approx(15.0));
  CHECK(r.series[8].phi0 == 0.2);
  CHECK(r.series.back().tau == doctest::Approx(40.0));
  CHECK(r.max_unitarity_defect < 1e-12);
  CHECK(r.series.back().distance == doctest::Approx(trace_distance(r.final_gas, bath)).epsilon(1e-12));
  CHECK(r.series.back().distance < r.series.front().distance);

  c.segments.clear();
  CHECK_THROWS_AS(run_equilibration(c), std::invalid_argument);
}

TEST_CASE("equilibration steps agree with explicit powers of the contact propagator") {
  BathSequenceConfig c;
  c.n_levels = 4;
  c.segments = {{1.0, 1, 3, 5.0}};
  const EquilibrationResult r = run_equilibration(c);
  const FockBasis b(4);
  const Propagator u = exact_propagator(coupled_hamiltonian(b, 0.0, CouplingSpec{1.0, 1.0, 1.0}), 5.0);
  const DensityOperator bath = thermal_state(gas_hamiltonian(b, 0.0), Temperature(5.0));
  DensityOperator total = tensor_product(thermal_state(gas_hamiltonian(b, 0.0), Temperature(1.0)), bath);
  for (int k = 1; k <= 3; ++k) {
    total = u.evolve(total);
    CHECK(r.series[k].distance == doctest::Approx(trace_distance(partial_trace_bath(total), bath)).epsilon(1e-10));
  }
}

TEST_CASE("cycle ledger") {
  CycleRecord r;
  r.e_expanded_cold = 0.5;
  r.e_compressed_cold = 1.0;
  r.e_compressed_hot = 3.0;
  r.e_expanded_hot = 1.5;
  complete_ledger(r, 28.0);
  CHECK(r.work == doctest::Approx(1.0));
  CHECK(r.heat_in == doctest::Approx(2.0));
  CHECK(r.efficiency == doctest::Approx(0.5));
  CHECK(r.power == doctest::Approx(1.0 / 28.0));
}

TEST_CASE("engine on a small basis") {
  EngineConfig c;
  c.n_levels = 12;
  c.n_cycles = 6;
  c.tau_stroke = 1.0;
  c.tau_contact = 2.0;
  const EngineRun run = run_engine(c);
  REQUIRE(run.cycles.size() == 6);
  REQUIRE(run.cycle_change.size() == 6);

  double num = 0, den = 0;
  for (int k = 0; k < 12; ++k) {
    num += k * std::exp(-10.0 * k);
    den += std::exp(-10.0 * k);
  }
  CHECK(run.cycles[0].e_expanded_cold == doctest::Approx(0.5 + num / den).epsilon(1e-13));
  CHECK(run.cycles[0].e_expanded_cold == doctest::Approx(0.50005).epsilon(1e-5));

  for (std::size_t i = 0; i < run.cycles.size(); ++i) {
    const CycleRecord& r = run.cycles[i];
    CHECK(r.cycle_index == static_cast<int>(i) + 1);
    CHECK(std::abs(r.work + (r.e_expanded_hot - r.e_expanded_cold) - r.heat_in) < 1e-12);
    CHECK(r.power == doctest::Approx(r.work / 6.0));
  }
  CHECK(run.health.max_hermiticity <= 1e-12);
  CHECK(run.health.max_trace_error <= 1e-10);
  CHECK(run.health.min_eigenvalue >= -1e-10);
  CHECK(run.hot_contact_defect < 1e-12);

  const SteadyState s = steady_state(run.cycles, 3);
  double mean = 0;
  for (int i = 3; i < 6; ++i) mean += run.cycles[i].efficiency / 3;
  CHECK(s.efficiency == doctest::Approx(mean));
}

TEST_CASE("engine config validation") {
  EngineConfig c;
  c.omega = 1.0;
  CHECK_THROWS_AS(run_engine(c), std::invalid_argument);
  c.omega = 2.0;
  c.n_cycles = 0;
  CHECK_THROWS_AS(run_engine(c), std::invalid_argument);
}

TEST_CASE("log slope fit") {
  std::vector<double> d{0.1, 0.05, 0.025, 0.0125}, e;
  for (double x : d) e.push_back(3.0 * std::pow(x, 5));
  CHECK(fit_log_slope(d, e) == doctest::Approx(5.0).epsilon(1e-12));
  e.back() = 0.0;
  CHECK(fit_log_slope(d, e) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("benchmark on a small basis") {
  BenchmarkConfig c;
  c.n_levels = 8;
  c.alpha_targets = {3.0};
  c.tau_final = 1.0;
  const BenchmarkResult r = run_benchmark(c, 2);
  REQUIRE(r.rows.size() == 2 * 14);
  REQUIRE(r.series.size() == 2);
  for (const BenchmarkRow& row : r.rows)
    if (row.divisor == 16) CHECK(row.error == 0.0);
  CHECK(r.rows[0].mode == BenchmarkMode::fixed);
  CHECK(r.rows[0].divisor == 3);
  c.divisors = {4, 5, 16};
  CHECK_THROWS_AS(run_benchmark(c), std::invalid_argument);
}
