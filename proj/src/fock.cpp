#include "ottosim/fock.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "ottosim/spectrum.hpp"

namespace ottosim {

FockBasis::FockBasis(int n_levels) : n_levels_(n_levels) {
  if (n_levels < 2) throw std::invalid_argument("n_levels must be >= 2, got " + std::to_string(n_levels));
}

Temperature::Temperature(double omega_T) : omega_T_(omega_T) {
  if (!std::isfinite(omega_T) || omega_T <= 0.0) {
    throw std::invalid_argument("omega_T must be positive and finite, got " + std::to_string(omega_T));
  }
}

double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

StateDefects measure_state_defects(const Matrix& rho) {
  StateDefects d;
  d.hermiticity = hermiticity_defect(rho);
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  const Matrix hermitian_part = 0.5 * (rho + rho.adjoint());
  d.min_eigenvalue = hermitian_eigenvalues(hermitian_part).minCoeff();
  return d;
}

DensityOperator::DensityOperator(FockBasis basis, int n_modes, Matrix matrix)
    : basis_(basis), n_modes_(n_modes), matrix_(std::move(matrix)) {
  if (n_modes != 1 && n_modes != 2) throw std::invalid_argument("density operator must have 1 or 2 modes");
  const Index dim = basis_.dimension(n_modes);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("density matrix dimension does not match basis");
  }
  const StateDefects d = measure_state_defects(matrix_);
  std::ostringstream msg;
  if (d.hermiticity > kHermitianTolerance) {
    msg << "density operator not Hermitian: max |rho - rho^dagger| = " << d.hermiticity;
  } else if (d.trace_error > kTraceTolerance) {
    msg << "density operator trace deviates from 1 by " << d.trace_error;
  } else if (d.min_eigenvalue < -kPositivityTolerance) {
    msg << "density operator not positive: eigenvalue " << d.min_eigenvalue;
  } else {
    return;
  }
  throw NumericalError(msg.str());
}

RealVector DensityOperator::eigenvalues() const { return hermitian_eigenvalues(matrix_); }

ModeOperator identity_operator(const FockBasis& basis) {
  return ModeOperator(basis, Matrix::Identity(basis.n_levels(), basis.n_levels()));
}

ModeOperator lowering_operator(const FockBasis& basis) {
  const int n = basis.n_levels();
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return ModeOperator(basis, std::move(a));
}

ModeOperator raising_operator(const FockBasis& basis) { return lowering_operator(basis).adjoint(); }

ModeOperator number_operator(const FockBasis& basis) {
  const int n = basis.n_levels();
  Matrix num = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
  return ModeOperator(basis, std::move(num));
}

ModeOperator position_operator(const FockBasis& basis) {
  const int n = basis.n_levels();
  Matrix x = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double element = std::sqrt(k / 2.0);
    x(k - 1, k) = element;
    x(k, k - 1) = element;
  }
  return ModeOperator(basis, std::move(x));
}

void oscillator_wavefunctions(double x, std::span<double> out) {
  if (out.empty()) return;
  // pi^{-1/4}
  const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  out[0] = norm * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::numbers::sqrt2 * x * out[0];
  for (std::size_t n = 2; n < out.size(); ++n) {
    const double dn = static_cast<double>(n);
    out[n] = std::sqrt(2.0 / dn) * x * out[n - 1] - std::sqrt((dn - 1.0) / dn) * out[n - 2];
  }
}

double oscillator_wavefunction(int n, double x) {
  if (n < 0) throw std::invalid_argument("oscillator level must be non-negative");
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  oscillator_wavefunctions(x, values);
  return values.back();
}

namespace {

DensityOperator thermal_from_matrix(const FockBasis& basis, int n_modes, const Matrix& h,
                                    Temperature temperature) {
  const HermitianSpectrum spectrum(h);
  const RealVector& e = spectrum.eigenvalues();
  // Shift by the ground energy so the largest weight is exactly 1.
  RealVector weights = (-(e.array() - e(0)) / temperature.omega_T()).exp();
  weights /= weights.sum();
  Matrix rho = spectrum.compose(weights);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(basis, n_modes, std::move(rho));
}

template <int M>
double energy_impl(const DensityOperator& rho, const Operator<M>& h) {
  if (rho.n_modes() != M || !(rho.basis() == h.basis())) {
    throw std::invalid_argument("energy: state and Hamiltonian dimensions differ");
  }
  // tr[H rho] = sum_ij H_ij rho_ji
  const Complex value = h.matrix().transpose().cwiseProduct(rho.matrix()).sum();
  if (std::abs(value.imag()) > 1e-8) {
    std::ostringstream msg;
    msg << "energy has imaginary part " << value.imag() << "; state or Hamiltonian is corrupted";
    throw NumericalError(msg.str());
  }
  return value.real();
}

}  // namespace

DensityOperator thermal_state(const ModeOperator& hamiltonian, Temperature temperature) {
  return thermal_from_matrix(hamiltonian.basis(), 1, hamiltonian.matrix(), temperature);
}

DensityOperator thermal_state(const CompositeOperator& hamiltonian, Temperature temperature) {
  return thermal_from_matrix(hamiltonian.basis(), 2, hamiltonian.matrix(), temperature);
}

DensityOperator ground_state(const ModeOperator& hamiltonian) {
  const HermitianSpectrum spectrum(hamiltonian.matrix());
  const Eigen::VectorXcd v = spectrum.eigenvector(0);
  Matrix rho = v * v.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(hamiltonian.basis(), 1, std::move(rho));
}

CompositeOperator tensor_product(const ModeOperator& gas, const ModeOperator& bath) {
  if (!(gas.basis() == bath.basis())) throw std::invalid_argument("tensor_product: basis mismatch");
  return CompositeOperator(gas.basis(), Eigen::kroneckerProduct(gas.matrix(), bath.matrix()));
}

DensityOperator tensor_product(const DensityOperator& gas, const DensityOperator& bath) {
  if (gas.n_modes() != 1 || bath.n_modes() != 1) {
    throw std::invalid_argument("tensor_product: both factors must be single-mode states");
  }
  if (!(gas.basis() == bath.basis())) throw std::invalid_argument("tensor_product: basis mismatch");
  return DensityOperator(gas.basis(), 2, Eigen::kroneckerProduct(gas.matrix(), bath.matrix()));
}

Matrix partial_trace_bath(const Matrix& total, const FockBasis& basis) {
  const Index n = basis.n_levels();
  if (total.rows() != n * n || total.cols() != n * n) {
    throw std::invalid_argument("partial_trace_bath: dimension " + std::to_string(total.rows()) +
                                " is not n_levels^2 = " + std::to_string(n * n));
  }
  Matrix reduced = Matrix::Zero(n, n);
  for (Index g = 0; g < n; ++g) {
    for (Index gp = 0; gp < n; ++gp) {
      // Trace of the (gp, g) bath block.
      reduced(gp, g) = total.block(gp * n, g * n, n, n).trace();
    }
  }
  return reduced;
}

DensityOperator partial_trace_bath(const DensityOperator& total) {
  if (total.n_modes() != 2) throw std::invalid_argument("partial_trace_bath: state is not two-mode");
  Matrix reduced = partial_trace_bath(total.matrix(), total.basis());
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityOperator(total.basis(), 1, std::move(reduced));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dimension() != sigma.dimension()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const Matrix diff = rho.matrix() - sigma.matrix();
  return 0.5 * hermitian_eigenvalues(0.5 * (diff + diff.adjoint())).cwiseAbs().sum();
}

double energy(const DensityOperator& rho, const ModeOperator& hamiltonian) { return energy_impl(rho, hamiltonian); }
double energy(const DensityOperator& rho, const CompositeOperator& hamiltonian) {
  return energy_impl(rho, hamiltonian);
}

}  // namespace ottosim
