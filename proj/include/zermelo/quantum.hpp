#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "zermelo/errors.hpp"

namespace zermelo::quantum {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Traceless Hermitian operator (an element of i·su(N)).
class HermitianOp {
 public:
  HermitianOp() = default;
  // Throws invalid_input unless A is Hermitian and traceless within `tol`.
  explicit HermitianOp(CMatrix A, double tol = 1e-12);

  const CMatrix& matrix() const { return m_; }
  int dimension() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

// Element of SU(N).
class UnitaryGate {
 public:
  UnitaryGate() = default;
  explicit UnitaryGate(CMatrix U, double unitarity_tol = 1e-10, double det_tol = 1e-8);

  const CMatrix& matrix() const { return m_; }
  int dimension() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

/// sqrt(tr(A²)) for Hermitian A.
template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& A) {
  return std::sqrt(std::max(0.0, (A * A).trace().real()));
}

inline double hs_norm(const HermitianOp& A) { return hs_norm(A.matrix()); }

/// sqrt(tr(D†D)) for D = A − B; the Hilbert–Schmidt distance of general matrices.
template <typename DerivedA, typename DerivedB>
double hs_distance(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  return (A - B).norm();
}

/// e^{−iHt} via the eigendecomposition of H.
CMatrix unitary_exp(const CMatrix& H, double t);

struct UnitaryLog {
  CMatrix log;  // anti-Hermitian, eigenphases in (−π, π]
  bool branch_ambiguous = false;  // an eigenvalue sat within 1e-10 of −1
  double max_abs_phase = 0.0;
};

/// Principal logarithm of a unitary matrix from its (diagonal) Schur form.
UnitaryLog matrix_log_unitary(const CMatrix& U);

/// e^{−iH₀t} H₁(0) e^{iH₀t}
HermitianOp optimal_hamiltonian(const HermitianOp& H0, const HermitianOp& H1_0, double t);

/// U(t) = e^{−iH₀t} e^{−iH₁(0)t} U_I
CMatrix propagate_closed_form(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I, double t);

/// max over the grid of ‖dU/dt + i(H₀ + H₁(t))U(t)‖_HS, with dU/dt from
/// central differences at the grid spacing.
double schrodinger_residual(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                            std::span<const double> t_grid);

struct GateProblem {
  HermitianOp H0;
  UnitaryGate U_I;
  UnitaryGate U_F;
};

// Throws invalid_input on dimension disagreement or hs_norm(H0) ≥ 1.
void validate(const GateProblem& prob);

struct GateSolution {
  HermitianOp H1_0;
  double T = 0.0;
  int iterations = 0;
  bool degenerate = false;      // U_F = U_I: T = 0 and H1_0 is arbitrary
  bool branch_warning = false;  // a logarithm met the −1 branch point
};

struct GateSolveOptions {
  double tol = 1e-10;
  int max_iterations = 500;
};

/// Fixed point T ← ‖log(e^{iH₀T} U_F U_I†)‖_HS, then H₁(0) = i·log(…)/T.
GateSolution solve_gate_navigation(const GateProblem& prob, const GateSolveOptions& options = {});

struct InteractionReport {
  double closed_form_error = 0.0;  // max ‖Z(t) − e^{−iH₁(0)t}U_I‖_HS
  double speed_deviation = 0.0;    // max | ‖Ż Z⁻¹‖_HS − 1 |
  double velocity_deviation = 0.0; // max ‖Ż Z⁻¹ + iH₁(0)‖_HS
};

using Propagator = std::function<CMatrix(double)>;

/// Checks on the interaction-picture curve Z(t) = e^{iH₀t}U(t) for an
/// arbitrary propagator U(t).
InteractionReport interaction_curve_checks(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                                           const Propagator& U, std::span<const double> t_grid);

/// Same checks for the closed-form optimal propagator.
InteractionReport interaction_curve_checks(const HermitianOp& H0, const HermitianOp& H1_0, const CMatrix& U_I,
                                           std::span<const double> t_grid);

}  // namespace zermelo::quantum
