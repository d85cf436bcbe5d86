#include "ottosim/spectrum.hpp"

#include <algorithm>
#include <sstream>

namespace ottosim {
namespace {

void require_hermitian(const Matrix& h) {
  if (h.rows() != h.cols()) throw NumericalError("Hamiltonian is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(h);
  if (defect > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "invalid Hamiltonian: not Hermitian (max |H - H^dagger| = " << defect << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

HermitianSpectrum::HermitianSpectrum(const Matrix& hermitian) {
  require_hermitian(hermitian);
  real_ = hermitian.imag().isZero(0.0);
  if (real_) {
    const RealMatrix symmetric = 0.5 * (hermitian.real() + hermitian.real().transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(symmetric);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    values_ = solver.eigenvalues();
    real_vectors_ = solver.eigenvectors();
  } else {
    const Matrix symmetric = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    values_ = solver.eigenvalues();
    complex_vectors_ = solver.eigenvectors();
  }
}

Eigen::VectorXcd HermitianSpectrum::eigenvector(Index k) const {
  if (real_) return real_vectors_.col(k).cast<Complex>();
  return complex_vectors_.col(k);
}

Matrix HermitianSpectrum::eigenvectors() const {
  if (real_) return real_vectors_.cast<Complex>();
  return complex_vectors_;
}

Matrix HermitianSpectrum::compose(const Eigen::VectorXcd& weights) const {
  if (real_) {
    // V diag(w) V^T with real V: two real products instead of one complex one.
    const RealMatrix vt = real_vectors_.transpose();
    const RealMatrix re = real_vectors_ * (weights.real().asDiagonal() * vt);
    const RealMatrix im = real_vectors_ * (weights.imag().asDiagonal() * vt);
    Matrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }
  return complex_vectors_ * weights.asDiagonal() * complex_vectors_.adjoint();
}

Matrix HermitianSpectrum::compose(const RealVector& weights) const {
  if (real_) {
    const RealMatrix out = real_vectors_ * weights.asDiagonal() * real_vectors_.transpose();
    return out.cast<Complex>();
  }
  return complex_vectors_ * weights.cast<Complex>().asDiagonal() * complex_vectors_.adjoint();
}

RealVector hermitian_eigenvalues(const Matrix& hermitian) {
  require_hermitian(hermitian);
  if (hermitian.imag().isZero(0.0)) {
    const RealMatrix symmetric = 0.5 * (hermitian.real() + hermitian.real().transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    return solver.eigenvalues();
  }
  const Matrix symmetric = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return solver.eigenvalues();
}

}  // namespace ottosim
