#include "zermelo/quantum.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace zermelo::quantum {

namespace {

const Complex I_unit{0.0, 1.0};

double grid_spacing(std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw Error(ErrorCode::invalid_input, "time grid needs at least two points");
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t_grid.size(); ++i) spacing = std::min(spacing, t_grid[i] - t_grid[i - 1]);
  if (!(spacing > 0.0)) throw Error(ErrorCode::invalid_input, "time grid must be strictly increasing");
  return spacing;
}

}  // namespace

HermitianOp::HermitianOp(CMatrix A, double tol) : m_(std::move(A)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorCode::dimension_mismatch, "Hermitian operator must be square");
  }
  const CMatrix defect = m_ - m_.adjoint();
  Eigen::Index row = 0, col = 0;
  if (defect.cwiseAbs().maxCoeff(&row, &col) > tol) {
    std::ostringstream os;
    os << "operator is not Hermitian: entry (" << row + 1 << "," << col + 1 << ") differs from the conjugate of ("
       << col + 1 << "," << row + 1 << ")";
    throw Error(ErrorCode::invalid_input, os.str());
  }
  if (std::abs(m_.trace()) > tol) throw Error(ErrorCode::invalid_input, "operator is not traceless");
}

UnitaryGate::UnitaryGate(CMatrix U, double unitarity_tol, double det_tol) : m_(std::move(U)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorCode::dimension_mismatch, "gate must be square");
  }
  const auto n = m_.rows();
  if ((m_.adjoint() * m_ - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > unitarity_tol) {
    throw Error(ErrorCode::invalid_input, "gate is not unitary");
  }
  if (std::abs(m_.determinant() - 1.0) > det_tol) {
    throw Error(ErrorCode::invalid_input, "gate determinant is not 1");
  }
}

CMatrix unitary_exp(const CMatrix& H, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(H);
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([t](double lambda) { return std::exp(-I_unit * (lambda * t)); });
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

UnitaryLog matrix_log_unitary(const CMatrix& U) {
  // A normal matrix has a diagonal Schur form, so Q diag(iφ) Q† is exact up to
  // the unit-modulus error of the input.
  Eigen::ComplexSchur<CMatrix> schur(U);
  const CMatrix& Q = schur.matrixU();
  const CMatrix& T = schur.matrixT();
  const auto n = U.rows();
  Eigen::VectorXcd logs(n);
  UnitaryLog out;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = T(k, k);
    double phase = std::arg(lambda);
    if (std::abs(lambda + 1.0) < 1e-10) {
      out.branch_ambiguous = true;
      phase = std::numbers::pi;
    }
    out.max_abs_phase = std::max(out.max_abs_phase, std::abs(phase));
    logs[k] = Complex(0.0, phase);
  }
  out.log = Q * logs.asDiagonal() * Q.adjoint();
  return out;
}

HermitianOp optimal_hamiltonian(const HermitianOp& H0, const HermitianOp& H1_0, double t) {
  const CMatrix drift = unitary_exp(H0.matrix(), t);
  CMatrix H1 = drift * H1_0.matrix() * drift.adjoint();
  H1 = 0.5 * (H1 + H1.adjoint()).eval();
  return HermitianOp(std::move(H1), 1e-9);
}

CMatrix propagate_closed_form(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I, double t) {
  return unitary_exp(H0.matrix(), t) * unitary_exp(H1_0.matrix(), t) * U_I;
}

double schrodinger_residual(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                            std::span<const double> t_grid) {
  const double dt = grid_spacing(t_grid);
  double worst = 0.0;
  for (double t : t_grid) {
    const CMatrix dU =
        (propagate_closed_form(H0, H1_0, U_I, t + dt) - propagate_closed_form(H0, H1_0, U_I, t - dt)) / (2.0 * dt);
    const CMatrix H = H0.matrix() + optimal_hamiltonian(H0, H1_0, t).matrix();
    const CMatrix defect = dU + I_unit * H * propagate_closed_form(H0, H1_0, U_I, t);
    worst = std::max(worst, defect.norm());
  }
  return worst;
}

void validate(const GateProblem& prob) {
  const int n = prob.H0.dimension();
  if (prob.U_I.dimension() != n || prob.U_F.dimension() != n) {
    throw Error(ErrorCode::dimension_mismatch, "gate problem dimensions disagree");
  }
  if (!(hs_norm(prob.H0) < 1.0)) {
    throw Error(ErrorCode::invalid_input, "drift Hamiltonian must have Hilbert-Schmidt norm below 1");
  }
}

GateSolution solve_gate_navigation(const GateProblem& prob, const GateSolveOptions& options) {
  validate(prob);
  const int n = prob.H0.dimension();
  const CMatrix V = prob.U_F.matrix() * prob.U_I.matrix().adjoint();
  GateSolution sol;

  UnitaryLog log = matrix_log_unitary(V);
  sol.branch_warning = log.branch_ambiguous;
  double T = hs_norm(CMatrix(I_unit * log.log));
  if (T < 1e-12) {
    CMatrix unit = CMatrix::Zero(n, n);
    if (n > 1) {
      unit(0, 0) = 1.0 / std::sqrt(2.0);
      unit(1, 1) = -1.0 / std::sqrt(2.0);
    }
    sol.H1_0 = HermitianOp(unit);
    sol.degenerate = true;
    return sol;
  }

  for (int it = 1; it <= options.max_iterations; ++it) {
    log = matrix_log_unitary(unitary_exp(prob.H0.matrix(), -T) * V);
    sol.branch_warning = sol.branch_warning || log.branch_ambiguous;
    const double next = hs_norm(CMatrix(I_unit * log.log));
    const bool done = std::abs(next - T) <= options.tol;
    T = next;
    sol.iterations = it;
    if (done) {
      log = matrix_log_unitary(unitary_exp(prob.H0.matrix(), -T) * V);
      CMatrix H1 = I_unit * log.log / T;
      H1 = 0.5 * (H1 + H1.adjoint()).eval();
      // A principal logarithm off SU(N) means the fixed point crossed a branch cut.
      const Complex trace = H1.trace();
      if (std::abs(trace) > 1e-8) {
        sol.branch_warning = true;
        H1 -= trace / static_cast<double>(n) * CMatrix::Identity(n, n);
      }
      sol.T = T;
      sol.H1_0 = HermitianOp(std::move(H1), 1e-8);
      return sol;
    }
  }
  std::ostringstream os;
  os << "gate navigation fixed point did not converge in " << options.max_iterations
     << " iterations (last T = " << T << ")";
  throw Error(ErrorCode::non_convergence, os.str());
}

InteractionReport interaction_curve_checks(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                                           const Propagator& U, std::span<const double> t_grid) {
  const double dt = grid_spacing(t_grid);
  auto Z = [&](double t) -> CMatrix { return unitary_exp(H0.matrix(), -t) * U(t); };
  const CMatrix expected_velocity = -I_unit * H1_0.matrix();
  InteractionReport report;
  for (double t : t_grid) {
    const CMatrix z = Z(t);
    report.closed_form_error =
        std::max(report.closed_form_error, hs_distance(z, unitary_exp(H1_0.matrix(), t) * U_I));
    const CMatrix velocity = (Z(t + dt) - Z(t - dt)) / (2.0 * dt) * z.adjoint();
    report.speed_deviation = std::max(report.speed_deviation, std::abs(velocity.norm() - 1.0));
    report.velocity_deviation = std::max(report.velocity_deviation, hs_distance(velocity, expected_velocity));
  }
  return report;
}

InteractionReport interaction_curve_checks(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                                           std::span<const double> t_grid) {
  return interaction_curve_checks(
      H0, H1_0, U_I, [&](double t) { return propagate_closed_form(H0, H1_0, U_I, t); }, t_grid);
}

}  // namespace zermelo::quantum
