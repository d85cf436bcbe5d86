#include "ottosim/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "ottosim/quadrature.hpp"

namespace ottosim {

void StiffnessSchedule::validate() const {
  if (!(alpha_start >= 0.0) || !(alpha_end >= 0.0)) throw std::invalid_argument("stiffness alpha must be >= 0");
  if (!(tau_alpha > 0.0) || !std::isfinite(tau_alpha)) throw std::invalid_argument("tau_alpha must be positive");
}

void CouplingSpec::validate() const {
  if (!std::isfinite(phi0)) throw std::invalid_argument("phi0 must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw std::invalid_argument("x0 must be >= 0");
}

ModeOperator gas_hamiltonian(const FockBasis& basis, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("gas_hamiltonian: alpha must be >= 0");
  const int n = basis.n_levels();
  Matrix h = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = (k + 0.5) * (1.0 + 0.5 * alpha);
  // <k+2| g^dag g^dag |k> = sqrt((k+1)(k+2)), and g g is its transpose.
  for (int k = 0; k + 2 < n; ++k) {
    const double element = 0.25 * alpha * std::sqrt((k + 1.0) * (k + 2.0));
    h(k + 2, k) = element;
    h(k, k + 2) = element;
  }
  return ModeOperator(basis, std::move(h));
}

namespace {

RealMatrix gaussian_elements(int n_levels, const CouplingSpec& c, int nodes, double half_width) {
  const QuadratureRule rule = gauss_legendre(nodes, -half_width, half_width);
  RealMatrix psi(nodes, n_levels);
  RealVector weight(nodes);
  std::vector<double> row(n_levels);
  for (int i = 0; i < nodes; ++i) {
    const double x = rule.nodes[i];
    oscillator_wavefunctions(x, row);
    for (int k = 0; k < n_levels; ++k) psi(i, k) = row[k];
    const double d = x - c.x0;
    weight(i) = rule.weights[i] * std::exp(-d * d / (2.0 * c.sigma * c.sigma));
  }
  RealMatrix phi = psi.transpose() * weight.asDiagonal() * psi;
  return 0.5 * (phi + phi.transpose());
}

}  // namespace

ModeOperator gaussian_coupling_matrix(const FockBasis& basis, const CouplingSpec& coupling,
                                      QuadratureReport* report) {
  coupling.validate();
  const int n = basis.n_levels();
  const double half_width = coupling.x0 + 6.0 * std::max(coupling.sigma, std::sqrt(2.0 * n + 1.0));
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxDoublings = 8;

  int nodes = 8 * n;
  RealMatrix previous = gaussian_elements(n, coupling, nodes, half_width);
  double change = 0.0;
  for (int doubling = 0; doubling < kMaxDoublings; ++doubling) {
    nodes *= 2;
    RealMatrix current = gaussian_elements(n, coupling, nodes, half_width);
    change = (current - previous).cwiseAbs().maxCoeff();
    previous = std::move(current);
    if (change <= kTolerance) {
      if (report != nullptr) *report = {nodes, half_width, change};
      if (coupling.x0 == 0.0) {
        // Odd integrand: opposite-parity elements vanish.
        for (int j = 0; j < n; ++j)
          for (int k = (j + 1) % 2; k < n; k += 2) previous(j, k) = 0.0;
      }
      return ModeOperator(basis, previous.cast<Complex>());
    }
  }
  std::ostringstream msg;
  msg << "Gaussian coupling quadrature did not converge: last doubling to " << nodes
      << " nodes changed an element by " << change;
  throw NumericalError(msg.str());
}

CompositeOperator interaction_matrix(const ModeOperator& phi_single, double phi0) {
  return CompositeOperator(phi_single.basis(),
                           phi0 * Eigen::kroneckerProduct(phi_single.matrix(), phi_single.matrix()).eval());
}

CompositeOperator coupled_hamiltonian(const FockBasis& basis, double alpha, double phi0,
                                      const ModeOperator& phi_single) {
  if (!(phi_single.basis() == basis)) throw std::invalid_argument("coupled_hamiltonian: basis mismatch");
  const ModeOperator h = gas_hamiltonian(basis, alpha);
  const ModeOperator id = identity_operator(basis);
  CompositeOperator total = tensor_product(h, id);
  total += tensor_product(id, h);
  total += interaction_matrix(phi_single, phi0);
  return total;
}

CompositeOperator coupled_hamiltonian(const FockBasis& basis, double alpha, const CouplingSpec& coupling) {
  return coupled_hamiltonian(basis, alpha, coupling.phi0, gaussian_coupling_matrix(basis, coupling));
}

}  // namespace ottosim
