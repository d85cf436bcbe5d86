#include "ottosim/propagators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ottosim {

double unitarity_defect(const Matrix& u) {
  // U = A + iB: U^dag U = (A^T A + B^T B) + i (A^T B - B^T A), all in real products.
  const RealMatrix a = u.real();
  const RealMatrix b = u.imag();
  RealMatrix re = a.transpose() * a;
  re.noalias() += b.transpose() * b;
  re.diagonal().array() -= 1.0;
  const RealMatrix cross = a.transpose() * b;
  const RealMatrix im = cross - cross.transpose();
  return (re.array().square() + im.array().square()).sqrt().maxCoeff();
}

Propagator::Propagator(FockBasis basis, int n_modes, Matrix matrix, double duration)
    : basis_(basis), n_modes_(n_modes), matrix_(std::move(matrix)), duration_(duration) {
  if (n_modes != 1 && n_modes != 2) throw std::invalid_argument("propagator must act on 1 or 2 modes");
  const Index dim = basis_.dimension(n_modes);
  if (matrix_.rows() != dim || matrix_.cols() != dim) throw std::invalid_argument("propagator dimension mismatch");
  defect_ = ottosim::unitarity_defect(matrix_);
}

void Propagator::require_compatible(const DensityOperator& rho) const {
  if (rho.n_modes() != n_modes_ || !(rho.basis() == basis_)) {
    throw std::invalid_argument("propagator and state act on different spaces");
  }
}

DensityOperator Propagator::evolve(const DensityOperator& rho, double* trace_loss) const {
  require_compatible(rho);
  return finish(matrix_ * rho.matrix() * matrix_.adjoint(), trace_loss);
}

DensityOperator Propagator::evolve_reversed(const DensityOperator& rho, double* trace_loss) const {
  require_compatible(rho);
  return finish(matrix_.adjoint() * rho.matrix() * matrix_, trace_loss);
}

DensityOperator Propagator::finish(Matrix out, double* trace_loss) const {
  out = 0.5 * (out + out.adjoint()).eval();
  const double trace = out.trace().real();
  const double loss = std::abs(trace - 1.0);
  if (!(loss <= kTraceLossLimit)) {
    std::ostringstream msg;
    msg << "propagator changed the state trace by " << loss << " (limit " << kTraceLossLimit
        << "); the propagator is not unitary enough, reduce the step size";
    throw NumericalError(msg.str());
  }
  out /= trace;
  if (trace_loss) *trace_loss = loss;
  return DensityOperator(basis_, n_modes_, std::move(out));
}

void StepRule::validate() const {
  if (n_max < 1) throw std::invalid_argument("step rule: n_max must be positive");
  if (!(alpha_max >= 0.0)) throw std::invalid_argument("step rule: alpha_max must be >= 0");
  if (!(divisor > 0.0)) throw std::invalid_argument("step rule: divisor must be positive");
}

double characteristic_time(const StepRule& rule) {
  rule.validate();
  return 1.0 / (2.0 * std::numbers::pi * rule.n_max * (1.0 + 0.5 * rule.alpha_max));
}

double step_size(const StepRule& rule) { return characteristic_time(rule) / rule.divisor; }

Propagator exact_propagator(const HermitianSpectrum& spectrum, const FockBasis& basis, int n_modes, double dtau) {
  const RealVector& e = spectrum.eigenvalues();
  Eigen::VectorXcd phases(e.size());
  for (Index k = 0; k < e.size(); ++k) {
    const double theta = -2.0 * std::numbers::pi * e(k) * dtau;
    phases(k) = Complex(std::cos(theta), std::sin(theta));
  }
  Propagator u(basis, n_modes, spectrum.compose(phases), dtau);
  if (u.unitarity_defect() > Propagator::kUnitarityTolerance) {
    std::ostringstream msg;
    msg << "exact propagator unitarity defect " << u.unitarity_defect() << " exceeds "
        << Propagator::kUnitarityTolerance;
    throw NumericalError(msg.str());
  }
  return u;
}

Propagator exact_propagator(const ModeOperator& hamiltonian, double dtau) {
  return exact_propagator(HermitianSpectrum(hamiltonian.matrix()), hamiltonian.basis(), 1, dtau);
}

Propagator exact_propagator(const CompositeOperator& hamiltonian, double dtau) {
  return exact_propagator(HermitianSpectrum(hamiltonian.matrix()), hamiltonian.basis(), 2, dtau);
}

namespace {

// Dormand-Prince tableau, fifth-order solution weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;

// One parity sector of the gas Hamiltonian. The squeezing term links n to
// n +- 2 only, so in the levels of one parity H(alpha) is tridiagonal.
struct ParityBlock {
  std::vector<Index> levels;
  RealVector diag_base, diag_slope;  // H(0) and dH/dalpha on the diagonal
  RealVector off_base, off_slope;    // same for (k, k + 1) within the block
};

std::vector<ParityBlock> parity_blocks(const FockBasis& basis) {
  const RealMatrix h0 = gas_hamiltonian(basis, 0.0).matrix().real();
  const RealMatrix h1 = gas_hamiltonian(basis, 1.0).matrix().real() - h0;
  const Index n = h0.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const bool allowed = i == j || std::abs(i - j) == 2;
      if (!allowed && (h0(i, j) != 0.0 || h1(i, j) != 0.0)) {
        throw std::logic_error("gas Hamiltonian is not tridiagonal within parity sectors");
      }
    }
  }
  std::vector<ParityBlock> blocks(2);
  for (int parity = 0; parity < 2; ++parity) {
    ParityBlock& b = blocks[parity];
    for (Index k = parity; k < n; k += 2) b.levels.push_back(k);
    const Index m = static_cast<Index>(b.levels.size());
    b.diag_base.resize(m);
    b.diag_slope.resize(m);
    b.off_base = RealVector::Zero(std::max<Index>(m - 1, 0));
    b.off_slope = RealVector::Zero(std::max<Index>(m - 1, 0));
    for (Index k = 0; k < m; ++k) {
      const Index l = b.levels[k];
      b.diag_base(k) = h0(l, l);
      b.diag_slope(k) = h1(l, l);
      if (k + 1 < m) {
        b.off_base(k) = h0(l + 2, l);
        b.off_slope(k) = h1(l + 2, l);
      }
    }
  }
  return blocks;
}

// out = T * in for the symmetric tridiagonal T = (d, e), one pass per column.
void apply_tridiagonal(const double* d, const double* e, Index m, const double* in, double* out) {
  if (m == 1) {
    out[0] = d[0] * in[0];
    return;
  }
  out[0] = d[0] * in[0] + e[0] * in[1];
  for (Index i = 1; i + 1 < m; ++i) out[i] = e[i - 1] * in[i - 1] + d[i] * in[i] + e[i] * in[i + 1];
  out[m - 1] = e[m - 2] * in[m - 2] + d[m - 1] * in[m - 1];
}

// Dormand-Prince fifth-order weights at a fixed step on one parity block. The
// state is [Re U | Im U]; with H real, -2 pi i H (A + iB) = 2 pi H B - 2 pi i H A.
RealMatrix integrate_block(const ParityBlock& block, const StiffnessSchedule& schedule, long steps, double h) {
  const Index m = static_cast<Index>(block.levels.size());
  RealMatrix u = RealMatrix::Zero(m, 2 * m);
  u.leftCols(m).setIdentity();
  RealMatrix y(m, 2 * m), k1(m, 2 * m), k2(m, 2 * m), k3(m, 2 * m), k4(m, 2 * m), k5(m, 2 * m), k6(m, 2 * m);
  RealVector dp(m), ep(std::max<Index>(m - 1, 1)), dm(m), em(std::max<Index>(m - 1, 1));
  const double two_pi = 2.0 * std::numbers::pi;

  auto derivative = [&](double tau, const RealMatrix& state, RealMatrix& out) {
    const double alpha = schedule.alpha_at(tau);
    dp = two_pi * (block.diag_base + alpha * block.diag_slope);
    dm = -dp;
    if (m > 1) {
      ep.head(m - 1) = two_pi * (block.off_base + alpha * block.off_slope);
      em.head(m - 1) = -ep.head(m - 1);
    }
    for (Index j = 0; j < m; ++j) {
      apply_tridiagonal(dp.data(), ep.data(), m, state.col(m + j).data(), out.col(j).data());
      apply_tridiagonal(dm.data(), em.data(), m, state.col(j).data(), out.col(m + j).data());
    }
  };

  for (long s = 0; s < steps; ++s) {
    const double t = h * static_cast<double>(s);
    derivative(t, u, k1);
    y = u + h * (a21 * k1);
    derivative(t + c2 * h, y, k2);
    y = u + h * (a31 * k1 + a32 * k2);
    derivative(t + c3 * h, y, k3);
    y = u + h * (a41 * k1 + a42 * k2 + a43 * k3);
    derivative(t + c4 * h, y, k4);
    y = u + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    derivative(t + c5 * h, y, k5);
    y = u + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    derivative(t + h, y, k6);
    u += h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  }
  return u;
}

}  // namespace

Rk5Integration integrate_rk5(const StiffnessSchedule& schedule, const FockBasis& basis, const StepRule& rule) {
  schedule.validate();
  const double nominal = step_size(rule);
  const double ratio = schedule.tau_alpha / nominal;
  // Tolerate round-off when the duration is an exact multiple of the step.
  const long steps = std::max(1L, static_cast<long>(std::ceil(ratio * (1.0 - 1e-12))));
  const double h = schedule.tau_alpha / static_cast<double>(steps);

  const Index n = basis.n_levels();
  Rk5Integration result;
  result.matrix = Matrix::Zero(n, n);
  for (const ParityBlock& block : parity_blocks(basis)) {
    const RealMatrix u = integrate_block(block, schedule, steps, h);
    const Index m = static_cast<Index>(block.levels.size());
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < m; ++i) result.matrix(block.levels[i], block.levels[j]) = Complex(u(i, j), u(i, m + j));
  }
  result.steps = steps;
  result.dtau = h;
  return result;
}

Propagator rk5_propagator(const StiffnessSchedule& schedule, const FockBasis& basis, const StepRule& rule) {
  Rk5Integration run = integrate_rk5(schedule, basis, rule);
  Propagator u(basis, 1, std::move(run.matrix), schedule.tau_alpha);
  if (u.unitarity_defect() > kRk5AbortDefect) {
    std::ostringstream msg;
    msg << "RK5 propagator unitarity defect " << u.unitarity_defect() << " exceeds " << kRk5AbortDefect
        << " (dtau = " << run.dtau << " over " << run.steps << " steps, eps = " << characteristic_time(rule)
        << "); reduce the step with a larger divisor";
    throw NumericalError(msg.str());
  }
  return u;
}

ContactChannel::ContactChannel(const Propagator& contact, const DensityOperator& bath)
    : basis_(contact.basis()), defect_(contact.unitarity_defect()) {
  if (contact.n_modes() != 2) throw std::invalid_argument("contact channel needs a two-mode propagator");
  if (bath.n_modes() != 1 || !(bath.basis() == basis_)) {
    throw std::invalid_argument("contact channel bath state must be single-mode on the same basis");
  }
  const Index n = basis_.n_levels();
  const HermitianSpectrum bath_spectrum(bath.matrix());
  Matrix weighted = bath_spectrum.eigenvectors();
  for (Index k = 0; k < n; ++k) {
    // Eigenvalues within the validated positivity tolerance below zero carry no weight.
    weighted.col(k) *= std::sqrt(std::max(0.0, bath_spectrum.eigenvalues()(k)));
  }

  stacked_.resize(n * n * n, n);
  const Matrix& u = contact.matrix();
  Matrix w(n * n, n);
  for (Index g = 0; g < n; ++g) {
    // w(g' n + m, k) = sum_b U(g' n + m, g n + b) phi_k(b) sqrt(p_k) = K_{m,k}(g', g)
    w.noalias() = u.middleCols(g * n, n) * weighted;
    for (Index m = 0; m < n; ++m) {
      for (Index k = 0; k < n; ++k) {
        const Index s = m * n + k;
        for (Index gp = 0; gp < n; ++gp) stacked_(s * n + gp, g) = w(gp * n + m, k);
      }
    }
  }
}

DensityOperator ContactChannel::apply(const DensityOperator& gas) const {
  if (gas.n_modes() != 1 || !(gas.basis() == basis_)) throw std::invalid_argument("contact channel: state mismatch");
  const Index n = basis_.n_levels();
  const Matrix t = stacked_ * gas.matrix();
  Matrix out = Matrix::Zero(n, n);
  for (Index s = 0; s < n * n; ++s) {
    out.noalias() += t.middleRows(s * n, n) * stacked_.middleRows(s * n, n).adjoint();
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(basis_, 1, std::move(out));
}

DensityOperator contact_explicit(const Propagator& contact, const DensityOperator& gas, const DensityOperator& bath) {
  return partial_trace_bath(contact.evolve(tensor_product(gas, bath)));
}

}  // namespace ottosim
