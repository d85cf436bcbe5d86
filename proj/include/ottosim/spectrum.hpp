#pragma once

#include "ottosim/fock.hpp"

namespace ottosim {

/// Eigendecomposition H = V diag(lambda) V^dagger of a Hermitian matrix.
///
/// Hamiltonians in this code are real symmetric; when the input has an
/// identically zero imaginary part the real solver is used and V is kept real,
/// which halves the cost of every function of H built from it.
class HermitianSpectrum {
 public:
  /// Throws NumericalError when max |H - H^dagger| exceeds 1e-12 * max(1, max|H|).
  explicit HermitianSpectrum(const Matrix& hermitian);

  const RealVector& eigenvalues() const noexcept { return values_; }
  bool is_real() const noexcept { return real_; }
  Index dimension() const noexcept { return values_.size(); }

  /// Eigenvector k as a complex column.
  Eigen::VectorXcd eigenvector(Index k) const;

  /// Eigenvectors as columns (complex copy).
  Matrix eigenvectors() const;

  /// V diag(weights) V^dagger.
  Matrix compose(const Eigen::VectorXcd& weights) const;
  Matrix compose(const RealVector& weights) const;

 private:
  RealVector values_;
  bool real_ = true;
  RealMatrix real_vectors_;
  Matrix complex_vectors_;
};

/// Ascending eigenvalues only.
RealVector hermitian_eigenvalues(const Matrix& hermitian);

}  // namespace ottosim
