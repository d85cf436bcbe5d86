#pragma once

// Gas-mode, coupling and contact Hamiltonians, all in units of hbar*Omega.

#include "ottosim/fock.hpp"

namespace ottosim {

/// alpha_max = omega^2 - 1 for a compressed/uncompressed frequency ratio omega.
inline double alpha_for_frequency_ratio(double omega) { return omega * omega - 1.0; }

/// Linear stiffness ramp alpha(tau) over one stroke of length tau_alpha.
struct StiffnessSchedule {
  double alpha_start = 0.0;
  double alpha_end = 0.0;
  double tau_alpha = 1.0;

  /// Throws std::invalid_argument for negative stiffness or non-positive duration.
  void validate() const;

  double alpha_at(double tau) const { return alpha_start + (alpha_end - alpha_start) * (tau / tau_alpha); }
  double alpha_max() const { return alpha_start > alpha_end ? alpha_start : alpha_end; }

  static StiffnessSchedule compression(double omega, double tau_alpha) {
    return {0.0, alpha_for_frequency_ratio(omega), tau_alpha};
  }
  static StiffnessSchedule expansion(double omega, double tau_alpha) {
    return {alpha_for_frequency_ratio(omega), 0.0, tau_alpha};
  }
};

/// Gaussian central potential phi0 * exp(-|r - r0|^2 / 2 sigma^2) with r0 on the
/// gas/bath diagonal (x_g0 = x_b0 = x0).
struct CouplingSpec {
  double phi0 = 1.0;
  double sigma = 1.0;
  double x0 = 1.0;

  void validate() const;
};

/// (g^dag g + 1/2)(1 + alpha/2) + (alpha/4)(g^dag g^dag + g g).
ModeOperator gas_hamiltonian(const FockBasis& basis, double alpha);

struct QuadratureReport {
  int nodes = 0;           ///< node count of the accepted rule
  double half_width = 0;   ///< integration interval is [-half_width, half_width]
  double last_change = 0;  ///< max element change at the final doubling
};

/// Phi_single: <j| exp(-(x - x0)^2 / 2 sigma^2) |k>, real symmetric, without the
/// phi0 prefactor. Gauss-Legendre quadrature on [-L, L] with
/// L = x0 + 6 max(sigma, sqrt(2 n_levels + 1)), starting at 8 n_levels nodes and
/// doubling until no element moves by more than 1e-10. Throws NumericalError if
/// that does not happen within the node budget.
ModeOperator gaussian_coupling_matrix(const FockBasis& basis, const CouplingSpec& coupling,
                                      QuadratureReport* report = nullptr);

/// phi0 * Phi_single (x) Phi_single.
CompositeOperator interaction_matrix(const ModeOperator& phi_single, double phi0);

/// H_gas(alpha) (x) I + I (x) H_bath(alpha) + phi0 Phi_single (x) Phi_single.
/// Both modes carry the same alpha.
CompositeOperator coupled_hamiltonian(const FockBasis& basis, double alpha, const CouplingSpec& coupling);

/// Same, reusing a precomputed Phi_single so a phi0 schedule needs one quadrature.
CompositeOperator coupled_hamiltonian(const FockBasis& basis, double alpha, double phi0,
                                      const ModeOperator& phi_single);

}  // namespace ottosim
