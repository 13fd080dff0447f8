#pragma once

#include <cstdint>
#include <vector>

#include "zermelo/solver.hpp"

namespace zermelo {

// Piecewise-constant heading schedule over K equal segments. Each heading is a
// Euclidean unit vector in the h-orthonormal frame field, so the physical
// control E(q)·heading has unit h-norm wherever it is applied.
struct ControlSchedule {
  std::vector<Vector> headings;
  double T = 0.0;

  int segments() const { return static_cast<int>(headings.size()); }
};

struct OracleSettings {
  int K = 8;
  int restarts = 32;
  std::uint64_t seed = 0x5eed'2015'0aceULL;
  double tol = 1e-4;      // endpoint h-distance that counts as arrival
  double dt = 1e-2;       // RK4 step for the candidate simulations
  int bisection_depth = 20;
  double slack = 5e-3;    // discretisation allowance when certifying
};

/// RK4 integration of q̇ = W(q) + E(q)·c_k, one heading per segment. Output is
/// in the physical parameterization.
Trajectory simulate_control(const ZermeloData& z, const ChartPoint& x0, const ControlSchedule& sched,
                            double dt = 1e-3);

struct OracleResult {
  double T = 0.0;
  ControlSchedule witness;
  double miss = 0.0;       // endpoint h-distance of the witness
  int feasibility_checks = 0;
};

/// Smallest T (to bisection resolution) for which some K-segment schedule
/// lands within `tol` of the goal. Throws `infeasible` when even the search
/// horizon is not enough.
OracleResult oracle_min_time(const ZermeloData& z, const ChartPoint& x0, const ChartPoint& x_goal,
                             const OracleSettings& settings = {});

struct Certification {
  double solver_T = 0.0;
  double oracle_T = 0.0;
  double gap = 0.0;  // solver_T − oracle_T
  double slack = 0.0;
  bool certified = false;
  OracleResult oracle;
};

/// Certifies the solver's time against the brute-force oracle.
Certification compare_with_solver(const NavigationProblem& prob, const NavigationSolution& sol,
                                  const OracleSettings& settings = {});

/// A deliberately suboptimal solution: the first `leg_fraction` of the optimal
/// time is spent with the initial heading turned by `angle`, after which the
/// goal is re-intercepted optimally from wherever that leg ended.
NavigationSolution perturbed_solution(const NavigationProblem& prob, const NavigationSolution& sol,
                                      double angle, double leg_fraction = 0.5);

}  // namespace zermelo
