#pragma once

// Unitary time-evolution operators: exact exponentials of time-independent
// Hamiltonians and fixed-step fifth-order Runge-Kutta integration of the
// time-ordered propagator for stiffness ramps. Time is in oscillator periods,
// so U(dtau) = exp(-2 pi i H dtau).

#include <vector>

#include "ottosim/fock.hpp"
#include "ottosim/hamiltonians.hpp"
#include "ottosim/spectrum.hpp"

namespace ottosim {

/// max |U^dagger U - I| over all elements.
double unitarity_defect(const Matrix& u);

class Propagator {
 public:
  /// Defect allowed by the Propagator contract.
  static constexpr double kUnitarityTolerance = 1e-8;
  /// Trace change of an evolved state beyond which evolve() gives up.
  static constexpr double kTraceLossLimit = 1e-2;

  /// Measures (does not enforce) the unitarity defect.
  Propagator(FockBasis basis, int n_modes, Matrix matrix, double duration);

  const FockBasis& basis() const noexcept { return basis_; }
  int n_modes() const noexcept { return n_modes_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  double duration() const noexcept { return duration_; }
  double unitarity_defect() const noexcept { return defect_; }

  /// U rho U^dagger. A trace change above kTraceLossLimit throws
  /// NumericalError; a smaller one is divided out and reported through
  /// trace_loss when given.
  DensityOperator evolve(const DensityOperator& rho, double* trace_loss = nullptr) const;
  /// U^dagger rho U, same trace handling as evolve.
  DensityOperator evolve_reversed(const DensityOperator& rho, double* trace_loss = nullptr) const;

 private:
  void require_compatible(const DensityOperator& rho) const;
  DensityOperator finish(Matrix out, double* trace_loss) const;

  FockBasis basis_;
  int n_modes_;
  Matrix matrix_;
  double duration_;
  double defect_;
};

/// Step-size rule eps = [2 pi n_max (1 + alpha_max / 2)]^{-1}, dtau = eps / divisor.
struct StepRule {
  int n_max = 1;
  double alpha_max = 0.0;
  double divisor = 5.0;

  void validate() const;
};

double characteristic_time(const StepRule& rule);
double step_size(const StepRule& rule);

/// exp(-2 pi i H dtau) from the eigendecomposition of H. Throws NumericalError if
/// H is not Hermitian or the result misses the 1e-8 unitarity contract.
Propagator exact_propagator(const ModeOperator& hamiltonian, double dtau);
Propagator exact_propagator(const CompositeOperator& hamiltonian, double dtau);
Propagator exact_propagator(const HermitianSpectrum& spectrum, const FockBasis& basis, int n_modes,
                            double dtau);

/// Raw output of the fixed-step integrator.
struct Rk5Integration {
  Matrix matrix;
  long steps = 0;
  double dtau = 0.0;  ///< step actually taken (duration / steps)
};

/// Integrates dU/dtau = -2 pi i H(alpha(tau)) U, U(0) = I, with the Dormand-Prince
/// fifth-order weights at a fixed step: ceil(tau_alpha / step_size(rule)) steps,
/// shrunk to land exactly on tau_alpha. No re-unitarization.
Rk5Integration integrate_rk5(const StiffnessSchedule& schedule, const FockBasis& basis, const StepRule& rule);

/// Unitarity defect above which rk5_propagator aborts with a step-size diagnostic.
inline constexpr double kRk5AbortDefect = 1e-2;

/// integrate_rk5 wrapped as a Propagator; throws NumericalError when the defect
/// exceeds kRk5AbortDefect.
Propagator rk5_propagator(const StiffnessSchedule& schedule, const FockBasis& basis, const StepRule& rule);

/// The gas map rho -> tr_b[U (rho (x) rho_bath) U^dagger] for a fixed two-mode
/// propagator and bath state, held as Kraus operators
/// K_{m,k} = sqrt(p_k) <m|_b U |phi_k>_b where rho_bath = sum_k p_k |phi_k><phi_k|.
/// Applying it costs O(n^5) instead of O(n^6) for the explicit two-mode route.
class ContactChannel {
 public:
  ContactChannel(const Propagator& contact, const DensityOperator& bath);

  DensityOperator apply(const DensityOperator& gas) const;

  /// Defect of the propagator the channel was built from.
  double unitarity_defect() const noexcept { return defect_; }

 private:
  FockBasis basis_;
  Matrix stacked_;  // n^3 x n: Kraus operator s occupies rows [s n, (s + 1) n)
  double defect_;
};

/// Explicit route: tensor with the bath, conjugate, trace the bath out.
DensityOperator contact_explicit(const Propagator& contact, const DensityOperator& gas,
                                 const DensityOperator& bath);

}  // namespace ottosim
