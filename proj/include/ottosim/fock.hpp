#pragma once

// Operator algebra, states and state metrics on truncated Fock spaces.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ottosim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a computed object violates a numerical invariant
/// (non-Hermitian input, non-unitary propagator, invalid density operator).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of retained Fock states of one oscillator mode.
class FockBasis {
 public:
  explicit FockBasis(int n_levels);

  int n_levels() const noexcept { return n_levels_; }

  /// Matrix dimension of an operator acting on `n_modes` copies of this basis.
  Index dimension(int n_modes) const noexcept {
    return n_modes == 1 ? Index{n_levels_} : Index{n_levels_} * n_levels_;
  }

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int n_levels_;
};

// Two-mode ordering, used everywhere a composite object is built or traced:
// the gas factor comes first, so |g>|b> is stored at row g * n_levels + b and
// the gas index varies slowest.
inline Index composite_index(Index gas, Index bath, const FockBasis& basis) noexcept {
  return gas * basis.n_levels() + bath;
}

/// Dense operator on one (`Modes == 1`) or two (`Modes == 2`) modes.
template <int Modes>
class Operator {
  static_assert(Modes == 1 || Modes == 2);

 public:
  static constexpr int kModes = Modes;

  Operator(FockBasis basis, Matrix matrix) : basis_(basis), matrix_(std::move(matrix)) {
    const Index dim = basis_.dimension(Modes);
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
      throw std::invalid_argument("operator dimension " + std::to_string(matrix_.rows()) + "x" +
                                  std::to_string(matrix_.cols()) + " does not match basis dimension " +
                                  std::to_string(dim));
    }
  }

  const FockBasis& basis() const noexcept { return basis_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Index dimension() const noexcept { return matrix_.rows(); }

  Operator adjoint() const { return Operator(basis_, matrix_.adjoint()); }

  Operator& operator+=(const Operator& other) {
    require_same_basis(other);
    matrix_ += other.matrix_;
    return *this;
  }
  Operator& operator-=(const Operator& other) {
    require_same_basis(other);
    matrix_ -= other.matrix_;
    return *this;
  }
  Operator& operator*=(Complex scale) {
    matrix_ *= scale;
    return *this;
  }

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator op, Complex scale) { return op *= scale; }
  friend Operator operator*(Complex scale, Operator op) { return op *= scale; }

  /// Operator product.
  friend Operator operator*(const Operator& lhs, const Operator& rhs) {
    lhs.require_same_basis(rhs);
    return Operator(lhs.basis_, lhs.matrix_ * rhs.matrix_);
  }

 private:
  void require_same_basis(const Operator& other) const {
    if (!(basis_ == other.basis_)) throw std::invalid_argument("operators act on different Fock bases");
  }

  FockBasis basis_;
  Matrix matrix_;
};

using ModeOperator = Operator<1>;
using CompositeOperator = Operator<2>;

/// Dimensionless temperature omega_T = k_B T / (hbar Omega).
class Temperature {
 public:
  explicit Temperature(double omega_T);
  double omega_T() const noexcept { return omega_T_; }

 private:
  double omega_T_;
};

/// Hermitian, unit-trace, positive semidefinite operator on one or two modes.
/// Every constructor validates the invariants and throws NumericalError when
/// one fails; negative eigenvalues are never clipped.
class DensityOperator {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-10;
  static constexpr double kPositivityTolerance = 1e-10;

  DensityOperator(FockBasis basis, int n_modes, Matrix matrix);

  const FockBasis& basis() const noexcept { return basis_; }
  int n_modes() const noexcept { return n_modes_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Index dimension() const noexcept { return matrix_.rows(); }

  /// Eigenvalues in ascending order.
  RealVector eigenvalues() const;

 private:
  FockBasis basis_;
  int n_modes_;
  Matrix matrix_;
};

/// Validation report used by DensityOperator and by the stroke-by-stroke checks.
struct StateDefects {
  double hermiticity = 0.0;      ///< max |rho - rho^dagger|
  double trace_error = 0.0;      ///< |tr rho - 1|
  double min_eigenvalue = 0.0;
};
StateDefects measure_state_defects(const Matrix& rho);

ModeOperator identity_operator(const FockBasis& basis);
ModeOperator lowering_operator(const FockBasis& basis);
ModeOperator raising_operator(const FockBasis& basis);
ModeOperator number_operator(const FockBasis& basis);
/// x = (a + a^dagger) / sqrt(2) in oscillator-length units.
ModeOperator position_operator(const FockBasis& basis);

/// Dimensionless oscillator eigenfunction <x|n>, evaluated by the stable
/// three-term recurrence. Requires n >= 0.
double oscillator_wavefunction(int n, double x);

/// Fills out[k] = <x|k> for k < out.size() in one recurrence sweep.
void oscillator_wavefunctions(double x, std::span<double> out);

/// e^{-H/omega_T} / tr e^{-H/omega_T}. Throws NumericalError for non-Hermitian H.
DensityOperator thermal_state(const ModeOperator& hamiltonian, Temperature temperature);
DensityOperator thermal_state(const CompositeOperator& hamiltonian, Temperature temperature);

/// Projector on the lowest eigenvector of H (the omega_T -> 0 limit).
DensityOperator ground_state(const ModeOperator& hamiltonian);

/// Kronecker product, first argument is the gas factor.
CompositeOperator tensor_product(const ModeOperator& gas, const ModeOperator& bath);
DensityOperator tensor_product(const DensityOperator& gas, const DensityOperator& bath);

/// Traces the bath (second) factor out of a gas-first two-mode matrix.
/// Throws std::invalid_argument unless the matrix is n_levels^2 square.
Matrix partial_trace_bath(const Matrix& total, const FockBasis& basis);
DensityOperator partial_trace_bath(const DensityOperator& total);

/// (1/2) sum |lambda_i| over the eigenvalues of rho - sigma.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Re tr[H rho]; throws NumericalError if |Im tr[H rho]| > 1e-8.
double energy(const DensityOperator& rho, const ModeOperator& hamiltonian);
double energy(const DensityOperator& rho, const CompositeOperator& hamiltonian);

/// max |A - A^dagger| over all elements.
double hermiticity_defect(const Matrix& a);

}  // namespace ottosim
