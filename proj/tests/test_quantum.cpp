#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "random_ops.hpp"
#include "zermelo/quantum.hpp"

using namespace zermelo;
using namespace zermelo::quantum;
using namespace zermelo::testing;

namespace {

const Complex I{0.0, 1.0};

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -I, I, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Matrix exponential by Taylor series; independent of the eigendecomposition.
CMatrix taylor_exp(const CMatrix& A) {
  CMatrix term = CMatrix::Identity(A.rows(), A.cols());
  CMatrix sum = term;
  for (int k = 1; k < 60; ++k) {
    term = (term * A / static_cast<double>(k)).eval();
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(HermitianOp, RejectsNonHermitianAndTrace) {
  CMatrix bad = pauli_x();
  bad(0, 1) = 2.0;
  EXPECT_THROW(HermitianOp{bad}, Error);
  EXPECT_THROW(HermitianOp{CMatrix(CMatrix::Identity(2, 2))}, Error);
  try {
    HermitianOp{bad};
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(1,2)"), std::string::npos) << e.what();
  }
}

TEST(UnitaryGate, RejectsNonUnitaryAndWrongDeterminant) {
  EXPECT_THROW(UnitaryGate{CMatrix(2.0 * CMatrix::Identity(2, 2))}, Error);
  EXPECT_THROW(UnitaryGate{pauli_z()}, Error);  // det = −1
  EXPECT_NO_THROW(UnitaryGate{CMatrix(I * pauli_z())});
}

TEST(HsNorm, Examples) {
  EXPECT_EQ(hs_norm(CMatrix(CMatrix::Zero(2, 2))), 0.0);
  EXPECT_NEAR(hs_norm(CMatrix(pauli_x() / std::sqrt(2.0))), 1.0, 1e-15);
  EXPECT_NEAR(hs_norm(CMatrix(pauli_z() / std::sqrt(2.0))), 1.0, 1e-15);
}

TEST(UnitaryExp, AgreesWithTaylorSeries) {
  std::mt19937_64 rng(41);
  for (int n = 2; n <= 4; ++n) {
    const HermitianOp H = random_hermitian(rng, n, 1.3);
    EXPECT_LE(hs_distance(unitary_exp(H.matrix(), 0.7), taylor_exp(CMatrix(-I * 0.7 * H.matrix()))), 1e-12);
  }
}

TEST(MatrixLog, Identity) {
  const UnitaryLog L = matrix_log_unitary(CMatrix::Identity(3, 3));
  EXPECT_LE(L.log.norm(), 1e-15);
  EXPECT_FALSE(L.branch_ambiguous);
}

TEST(MatrixLog, QuarterTurnPhases) {
  CMatrix U(2, 2);
  U << I, 0, 0, -I;
  CMatrix expected(2, 2);
  expected << I * std::numbers::pi / 2.0, 0, 0, -I * std::numbers::pi / 2.0;
  EXPECT_LE(hs_distance(matrix_log_unitary(U).log, expected), 1e-12);
}

TEST(MatrixLog, SmallGeneratorIsRecovered) {
  std::mt19937_64 rng(42);
  for (int n = 2; n <= 4; ++n) {
    const CMatrix A = random_hermitian(rng, n, 0.3).matrix();
    const CMatrix U = taylor_exp(CMatrix(I * A));
    const UnitaryLog L = matrix_log_unitary(U);
    EXPECT_LE(hs_distance(L.log, CMatrix(I * A)), 1e-9);
    EXPECT_LE(hs_distance(taylor_exp(L.log), U), 1e-9);
  }
}

TEST(MatrixLog, MinusOneIsFlagged) {
  CMatrix U(2, 2);
  U << -1, 0, 0, -1;
  EXPECT_TRUE(matrix_log_unitary(U).branch_ambiguous);
}

TEST(OptimalHamiltonian, InitialTimeAndCommutingCase) {
  const HermitianOp H0(CMatrix(0.3 * pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hz(CMatrix(pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  EXPECT_LE(hs_distance(optimal_hamiltonian(H0, Hx, 0.0).matrix(), Hx.matrix()), 1e-15);
  EXPECT_LE(hs_distance(optimal_hamiltonian(H0, Hz, 1.7).matrix(), Hz.matrix()), 1e-14);
}

TEST(OptimalHamiltonian, PauliRotation) {
  const double w = 0.3 / std::sqrt(2.0);
  const HermitianOp H0(CMatrix(w * pauli_z()));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const HermitianOp H1 = optimal_hamiltonian(H0, Hx, 1.0);
  // e^{−iθσz/2} σx e^{iθσz/2} = cos θ σx + sin θ σy with θ = 2w.
  const CMatrix expected = (std::cos(2 * w) * pauli_x() + std::sin(2 * w) * pauli_y()) / std::sqrt(2.0);
  EXPECT_LE(hs_distance(H1.matrix(), expected), 1e-14);
  EXPECT_NEAR(hs_norm(H1), 1.0, 1e-14);
}

TEST(OptimalHamiltonian, NormIsPreserved) {
  std::mt19937_64 rng(43);
  const HermitianOp H0 = random_hermitian(rng, 3, 0.7);
  const HermitianOp H1 = random_hermitian(rng, 3, 1.0);
  for (double t : grid(3.0, 0.1)) EXPECT_NEAR(hs_norm(optimal_hamiltonian(H0, H1, t)), 1.0, 1e-13);
}

TEST(Propagator, ClosedFormCases) {
  const HermitianOp zero(CMatrix(CMatrix::Zero(2, 2)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const HermitianOp Hz(CMatrix(0.4 * pauli_z()));
  const CMatrix U_I = unitary_exp(pauli_y(), 0.3);
  EXPECT_LE(hs_distance(propagate_closed_form(Hz, Hx, U_I, 0.0), U_I), 1e-15);
  EXPECT_LE(hs_distance(propagate_closed_form(zero, Hx, U_I, 0.9), unitary_exp(Hx.matrix(), 0.9) * U_I), 1e-15);
  const HermitianOp Hz1(CMatrix(pauli_z() / std::sqrt(2.0)));
  EXPECT_LE(hs_distance(propagate_closed_form(Hz, Hz1, U_I, 0.9),
                        unitary_exp(CMatrix(Hz.matrix() + Hz1.matrix()), 0.9) * U_I),
            1e-14);
}

TEST(Schrodinger, ResidualIsSecondOrderSmall) {
  const HermitianOp zero(CMatrix(CMatrix::Zero(2, 2)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const HermitianOp Hz(CMatrix(0.3 * pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hz1(CMatrix(pauli_z() / std::sqrt(2.0)));
  const CMatrix U_I = CMatrix::Identity(2, 2);
  EXPECT_LE(schrodinger_residual(zero, Hx, U_I, grid(1.0, 1e-3)), 1e-5);
  EXPECT_LE(schrodinger_residual(Hz, Hz1, U_I, grid(1.0, 1e-3)), 1e-5);
  std::mt19937_64 rng(44);
  const HermitianOp H0 = random_hermitian(rng, 3, 0.8);
  const HermitianOp H1 = random_hermitian(rng, 3, 1.0);
  EXPECT_LE(schrodinger_residual(H0, H1, random_gate(rng, 3).matrix(), grid(1.5, 1e-3)), 1e-4);
}

TEST(GateSolver, DegenerateProblem) {
  std::mt19937_64 rng(45);
  const UnitaryGate U = random_gate(rng, 2);
  const GateSolution sol = solve_gate_navigation({random_hermitian(rng, 2, 0.5), U, U});
  EXPECT_TRUE(sol.degenerate);
  EXPECT_EQ(sol.T, 0.0);
  EXPECT_NEAR(hs_norm(sol.H1_0), 1.0, 1e-12);
}

TEST(GateSolver, NoDriftRecoversSigmaX) {
  const HermitianOp zero(CMatrix(CMatrix::Zero(2, 2)));
  const CMatrix Hx = pauli_x() / std::sqrt(2.0);
  const GateSolution sol = solve_gate_navigation(
      {zero, UnitaryGate(CMatrix::Identity(2, 2)), UnitaryGate(taylor_exp(CMatrix(-I * Hx)))});
  EXPECT_NEAR(sol.T, 1.0, 1e-10);
  EXPECT_LE(hs_distance(sol.H1_0.matrix(), Hx), 1e-9);
}

TEST(GateSolver, DriftRoundTrip) {
  const HermitianOp H0(CMatrix(0.3 * pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const UnitaryGate U_I(CMatrix::Identity(2, 2));
  const UnitaryGate U_F(propagate_closed_form(H0, Hx, U_I.matrix(), 0.8));
  const GateSolution sol = solve_gate_navigation({H0, U_I, U_F});
  EXPECT_NEAR(sol.T, 0.8, 1e-7);
  EXPECT_LE(hs_distance(sol.H1_0.matrix(), Hx.matrix()), 1e-7);
  EXPECT_NEAR(hs_norm(sol.H1_0), 1.0, 1e-9);
  EXPECT_LE(hs_distance(propagate_closed_form(H0, sol.H1_0, U_I.matrix(), sol.T), U_F.matrix()), 1e-8);
}

TEST(GateSolver, RejectsStrongDrift) {
  const HermitianOp H0(CMatrix(1.5 * pauli_z() / std::sqrt(2.0)));
  const UnitaryGate U(CMatrix::Identity(2, 2));
  EXPECT_THROW(solve_gate_navigation({H0, U, U}), Error);
}

TEST(GateSolver, IterationLimitIsReported) {
  const HermitianOp H0(CMatrix(0.5 * pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const UnitaryGate U_I(CMatrix::Identity(2, 2));
  const UnitaryGate U_F(propagate_closed_form(H0, Hx, U_I.matrix(), 1.2));
  GateSolveOptions options;
  options.max_iterations = 2;
  try {
    solve_gate_navigation({H0, U_I, U_F}, options);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_convergence);
  }
}

TEST(GateSolver, RandomRoundTrips) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> T(0.1, 2.0), drift(0.0, 0.8);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const HermitianOp H0 = random_hermitian(rng, n, drift(rng));
    const HermitianOp H1 = random_hermitian(rng, n, 1.0);
    const UnitaryGate U_I = random_gate(rng, n);
    const double T_true = T(rng);
    // Stay away from the branch cut of the logarithm.
    if (matrix_log_unitary(unitary_exp(H1.matrix(), T_true)).max_abs_phase > std::numbers::pi - 0.1) continue;
    const UnitaryGate U_F(propagate_closed_form(H0, H1, U_I.matrix(), T_true));
    const GateSolution sol = solve_gate_navigation({H0, U_I, U_F});
    EXPECT_NEAR(sol.T, T_true, 1e-7);
    EXPECT_LE(hs_distance(sol.H1_0.matrix(), H1.matrix()), 1e-6);
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(InteractionPicture, NoDrift) {
  const HermitianOp zero(CMatrix(CMatrix::Zero(2, 2)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const InteractionReport r = interaction_curve_checks(zero, Hx, CMatrix::Identity(2, 2), grid(1.0, 1e-3));
  EXPECT_LE(r.closed_form_error, 1e-14);
  EXPECT_LE(r.speed_deviation, 1e-6);
  EXPECT_LE(r.velocity_deviation, 1e-6);
}

TEST(InteractionPicture, GenericQubit) {
  std::mt19937_64 rng(47);
  const HermitianOp H0 = random_hermitian(rng, 2, 0.6);
  const HermitianOp H1 = random_hermitian(rng, 2, 1.0);
  const InteractionReport r = interaction_curve_checks(H0, H1, random_gate(rng, 2).matrix(), grid(1.0, 1e-3));
  EXPECT_LE(r.closed_form_error, 1e-5);
  EXPECT_LE(r.speed_deviation, 1e-5);
  EXPECT_LE(r.velocity_deviation, 1e-5);
}

TEST(InteractionPicture, LabFrameConstantControlIsNotAGeodesic) {
  const HermitianOp H0(CMatrix(0.5 * pauli_z() / std::sqrt(2.0)));
  const HermitianOp Hx(CMatrix(pauli_x() / std::sqrt(2.0)));
  const CMatrix U_I = CMatrix::Identity(2, 2);
  const Propagator lab = [&](double t) { return unitary_exp(CMatrix(H0.matrix() + Hx.matrix()), t) * U_I; };
  const InteractionReport r = interaction_curve_checks(H0, Hx, U_I, lab, grid(1.5, 1e-3));
  EXPECT_GT(r.velocity_deviation, 0.1);
}
