#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ottosim/fock.hpp"

namespace testing {

using ottosim::Complex;
using ottosim::Index;
using ottosim::Matrix;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(Index dim, std::mt19937_64& rng) {
  const Matrix a = random_complex(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

/// Full-rank random state A A^dag / tr.
inline ottosim::DensityOperator random_state(const ottosim::FockBasis& basis, int n_modes, std::mt19937_64& rng) {
  const Index dim = basis.dimension(n_modes);
  const Matrix a = random_complex(dim, dim, rng);
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return ottosim::DensityOperator(basis, n_modes, rho);
}

/// Pade exponential of -2 pi i H t, independent of any eigendecomposition.
inline Matrix expm_oracle(const Matrix& h, double t) {
  const Matrix generator = Complex(0.0, -2.0 * M_PI * t) * h;
  return generator.exp();
}

inline Matrix diag_levels(Index n) {
  Matrix h = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) h(k, k) = double(k) + 0.5;
  return h;
}

}  // namespace testing
