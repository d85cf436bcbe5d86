#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ottosim/hamiltonians.hpp"
#include "ottosim/quadrature.hpp"
#include "ottosim/spectrum.hpp"
#include "support.hpp"

using namespace ottosim;
using testing::max_abs;

namespace {

double hermite_function(int n, double x) {
  // physicists' Hermite polynomials up to n = 2
  const double g = std::pow(M_PI, -0.25) * std::exp(-x * x / 2);
  switch (n) {
    case 0: return g;
    case 1: return g * std::sqrt(2.0) * x;
    default: return g * (2 * x * x - 1) / std::sqrt(2.0);
  }
}

// Composite Simpson on [-12 + x0, 12 + x0].
double gaussian_element_simpson(int j, int k, double sigma, double x0) {
  const int m = 20000;
  const double a = x0 - 12.0, b = x0 + 12.0, h = (b - a) / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * hermite_function(j, x) * hermite_function(k, x) * std::exp(-(x - x0) * (x - x0) / (2 * sigma * sigma));
  }
  return s * h / 3.0;
}

Matrix swap_factors(const Matrix& m, int n) {
  Matrix out(m.rows(), m.cols());
  for (int g = 0; g < n; ++g)
    for (int b = 0; b < n; ++b)
      for (int gp = 0; gp < n; ++gp)
        for (int bp = 0; bp < n; ++bp) out(b * n + g, bp * n + gp) = m(g * n + b, gp * n + bp);
  return out;
}

}  // namespace

TEST_CASE("alpha = 0 gas hamiltonian is the bare oscillator") {
  const FockBasis b(20);
  CHECK(max_abs(gas_hamiltonian(b, 0.0).matrix() - testing::diag_levels(20)) == 0.0);
}

TEST_CASE("gas hamiltonian matrix elements") {
  const FockBasis b(8);
  for (double alpha : {0.5, 3.0, 8.0}) {
    const Matrix h = gas_hamiltonian(b, alpha).matrix();
    CHECK(h(2, 0).real() == doctest::Approx(alpha * std::sqrt(2.0) / 4).epsilon(1e-15));
    CHECK(h(0, 2) == h(2, 0));
    CHECK(h(3, 3).real() == doctest::Approx(3.5 * (1 + alpha / 2)));
    CHECK(h(1, 0) == Complex(0.0));
    CHECK(max_abs(h - h.adjoint()) == 0.0);
  }
  CHECK_THROWS_AS(gas_hamiltonian(b, -0.1), std::invalid_argument);
}

TEST_CASE("ground energy of the stiffened oscillator") {
  const FockBasis b(61);
  for (double alpha : {3.0, 8.0}) {
    const RealVector e = hermitian_eigenvalues(gas_hamiltonian(b, alpha).matrix());
    CHECK(std::abs(e(0) - std::sqrt(1 + alpha) / 2) < 1e-6);
  }
  const RealVector e3 = hermitian_eigenvalues(gas_hamiltonian(b, 3.0).matrix());
  CHECK(std::abs(e3(0) - 1.0) < 1e-6);
  CHECK(std::abs(e3(1) - e3(0) - 2.0) < 1e-5);
}

TEST_CASE("gas spectrum stays above 1/2") {
  const FockBasis b(41);
  for (double alpha : {0.0, 0.1, 1.0, 3.0, 5.25, 8.0, 15.0}) {
    CHECK(hermitian_eigenvalues(gas_hamiltonian(b, alpha).matrix())(0) >= 0.5 - 1e-14);
  }
}

TEST_CASE("gaussian coupling closed-form element and parity zeros") {
  const FockBasis b(41);
  const Matrix phi = gaussian_coupling_matrix(b, {1.0, 1.0, 0.0}).matrix();
  CHECK(std::abs(phi(0, 0).real() - std::sqrt(2.0 / 3.0)) < 1e-10);
  CHECK(std::abs(phi(0, 0).real() - 0.81650) < 1e-5);
  for (int j = 0; j < 41; ++j)
    for (int k = 0; k < 41; ++k)
      if ((j + k) % 2) CHECK(phi(j, k) == Complex(0.0));
  CHECK(max_abs(phi - phi.transpose()) == 0.0);
  CHECK(phi.imag().isZero(0.0));
}

TEST_CASE("gaussian coupling against an independent Simpson rule") {
  const FockBasis b(3);
  for (const CouplingSpec c : {CouplingSpec{1.0, 1.0, 1.0}, CouplingSpec{1.0, 0.6, 0.0}, CouplingSpec{1.0, 2.0, 0.4}}) {
    const Matrix phi = gaussian_coupling_matrix(b, c).matrix();
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(std::abs(phi(j, k).real() - gaussian_element_simpson(j, k, c.sigma, c.x0)) < 1e-10);
  }
}

TEST_CASE("gaussian coupling is converged in the node count") {
  const FockBasis b(41);
  const CouplingSpec c{1.0, 1.0, 1.0};
  QuadratureReport report;
  const Matrix phi = gaussian_coupling_matrix(b, c, &report).matrix();
  CHECK(report.last_change <= 1e-10);
  CHECK(report.nodes >= 16 * 41);
  CHECK(report.half_width == doctest::Approx(1.0 + 6.0 * std::sqrt(83.0)));

  // Twice the accepted node count, assembled here.
  const QuadratureRule rule = gauss_legendre(2 * report.nodes, -report.half_width, report.half_width);
  Eigen::MatrixXd fine = Eigen::MatrixXd::Zero(41, 41);
  std::vector<double> psi(41);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q];
    oscillator_wavefunctions(x, psi);
    const double w = rule.weights[q] * std::exp(-(x - 1.0) * (x - 1.0) / 2.0);
    for (int j = 0; j < 41; ++j)
      for (int k = 0; k < 41; ++k) fine(j, k) += w * psi[j] * psi[k];
  }
  CHECK((phi.real() - fine).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("coupling validation") {
  CHECK_THROWS_AS(CouplingSpec({1.0, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CouplingSpec({1.0, -1.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("interaction matrix is linear in phi0") {
  const FockBasis b(6);
  const ModeOperator phi = gaussian_coupling_matrix(b, {1.0, 1.0, 1.0});
  CHECK(max_abs(interaction_matrix(phi, 2.0).matrix() - 2.0 * interaction_matrix(phi, 1.0).matrix()) == 0.0);
}

TEST_CASE("coupled hamiltonian against a hand-assembled 9x9") {
  const FockBasis b(3);
  const double alpha = 8.0, phi0 = 0.7;
  const CouplingSpec c{phi0, 1.0, 1.0};
  Matrix hs = Matrix::Zero(3, 3), ps(3, 3);
  for (int k = 0; k < 3; ++k) hs(k, k) = (k + 0.5) * (1 + alpha / 2);
  hs(2, 0) = hs(0, 2) = alpha / 4 * std::sqrt(2.0);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) ps(j, k) = gaussian_element_simpson(j, k, 1.0, 1.0);
  Matrix expected = Matrix::Zero(9, 9);
  for (int g = 0; g < 3; ++g)
    for (int s = 0; s < 3; ++s)
      for (int gp = 0; gp < 3; ++gp)
        for (int sp = 0; sp < 3; ++sp) {
          Complex v = phi0 * ps(g, gp) * ps(s, sp);
          if (s == sp) v += hs(g, gp);
          if (g == gp) v += hs(s, sp);
          expected(3 * g + s, 3 * gp + sp) = v;
        }
  CHECK(max_abs(coupled_hamiltonian(b, alpha, c).matrix() - expected) < 1e-10);
}

TEST_CASE("coupled hamiltonian properties") {
  const FockBasis b(12);
  const Matrix h = coupled_hamiltonian(b, 8.0, CouplingSpec{1.0, 1.0, 1.0}).matrix();
  CHECK(max_abs(h - h.adjoint()) <= 1e-12);
  CHECK(max_abs(swap_factors(h, 12) - h) < 1e-14);

  const RealVector single = hermitian_eigenvalues(gas_hamiltonian(b, 3.0).matrix());
  std::vector<double> sums;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) sums.push_back(single(i) + single(j));
  std::sort(sums.begin(), sums.end());
  const RealVector decoupled = hermitian_eigenvalues(coupled_hamiltonian(b, 3.0, CouplingSpec{0.0, 1.0, 1.0}).matrix());
  for (int k = 0; k < 144; ++k) CHECK(std::abs(decoupled(k) - sums[k]) < 1e-11);
}

TEST_CASE("stiffness schedule") {
  const StiffnessSchedule s = StiffnessSchedule::compression(3.0, 2.0);
  CHECK(s.alpha_end == 8.0);
  CHECK(s.alpha_at(0.0) == 0.0);
  CHECK(s.alpha_at(1.0) == 4.0);
  CHECK(s.alpha_at(2.0) == 8.0);
  CHECK(StiffnessSchedule::expansion(2.0, 1.0).alpha_at(0.25) == doctest::Approx(2.25));
  CHECK_THROWS_AS(StiffnessSchedule({0.0, 1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(StiffnessSchedule({-1.0, 1.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("hermitian spectrum") {
  std::mt19937_64 rng(5);
  const Matrix h = testing::random_hermitian(7, rng);
  const HermitianSpectrum s(h);
  CHECK_FALSE(s.is_real());
  CHECK(max_abs(s.compose(Eigen::VectorXcd(s.eigenvalues().cast<Complex>())) - h) < 1e-13);
  const Matrix real = h.real().cast<Complex>();
  const HermitianSpectrum r(real);
  CHECK(r.is_real());
  CHECK(max_abs(r.compose(r.eigenvalues()) - real) < 1e-13);
  Matrix bad = h;
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(HermitianSpectrum{bad}, NumericalError);
}
