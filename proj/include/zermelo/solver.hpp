#pragma once

#include <optional>
#include <vector>

#include "zermelo/randers.hpp"

namespace zermelo {

struct ShootSettings {
  double shoot_tol = 1e-9;
  double ode_dt = 1e-3;
  int restarts = 16;
  int max_newton_iterations = 60;
};

struct NavigationProblem {
  ZermeloData z;
  ChartPoint start;
  ChartPoint goal;
  double sigma = 0.0;
  ShootSettings settings;
};

struct InterceptRoot {
  double T = 0.0;
  Vector direction;  // h-unit initial direction at the start point
  double miss = 0.0;  // h-norm of p(T) − moving target
};

struct NavigationSolution {
  Trajectory q_traj;  // physical parameterization, t ∈ [0, T]
  Trajectory p_traj;  // the wind-dragged curve p(t) = φ_t(q(t))
  double T = 0.0;
  Vector initial_control;
  std::vector<InterceptRoot> roots;  // every distinct root found, ascending T
};

/// s(t) = (2/σ)(1 − e^{−σt/2}), or t when σ = 0.
double homothety_arclength(double t, double sigma);

/// Re-times a unit-speed geodesic so that |ṗ(t)|_h = e^{−σt/2} on [0, T].
/// Positions come from cubic Hermite interpolation of the samples. Throws
/// invalid_input when gamma is not unit speed within `unit_tol` or is too
/// short to cover s(T).
Trajectory reparameterize_geodesic(const MetricField& h, const Trajectory& gamma, double sigma,
                                   double T, double dt = 1e-3, double unit_tol = 1e-6);

/// q(t) = ψ_t(p(t)) with ψ the flow of +W. Velocities use the exact identity
/// q̇ = W(q) + Dψ_t(ṗ).
Trajectory geodesic_to_trajectory(const ZermeloData& z, const Trajectory& p_traj, double sigma,
                                  double dt = 1e-3);

struct GeodesicCheck {
  Trajectory p_traj;
  // max ‖p̈ + Γ(ṗ, ṗ) − (d/dt log|ṗ|) ṗ‖_h over interior samples
  double residual = 0.0;
  std::size_t worst_sample = 0;
  // max | |ṗ|_h − e^{−σt/2} |
  double speed_law_deviation = 0.0;
};

/// p(t) = φ_t(q(t)) with φ the flow of −W, plus the pregeodesic residual of p.
GeodesicCheck trajectory_to_geodesic(const ZermeloData& z, const Trajectory& q_traj, double sigma,
                                     double dt = 1e-3);

/// Shoots geodesics from the start point until the re-timed curve meets the
/// moving target φ_T(goal). Returns the smallest-T interception.
NavigationSolution intercept_shoot(const NavigationProblem& prob);

struct VerifyThresholds {
  double full_throttle = 1e-5;
  double geodesic_residual = 1e-4;
  double length_relative = 1e-5;
  double endpoint = 1e-6;
  double oracle_slack = 5e-3;
};

struct SolutionReport {
  VerifyThresholds thresholds;
  double T = 0.0;
  double full_throttle_deviation = 0.0;
  double geodesic_residual = 0.0;
  double speed_law_deviation = 0.0;
  double randers_length = 0.0;
  double length_error = 0.0;  // |randers_length − T|
  double start_error = 0.0;
  double goal_error = 0.0;
  std::optional<double> oracle_T;

  bool full_throttle_ok = false;
  bool geodesic_ok = false;
  bool length_ok = false;
  bool endpoints_ok = false;
  bool oracle_ok = true;

  bool pass() const { return full_throttle_ok && geodesic_ok && length_ok && endpoints_ok && oracle_ok; }
};

/// Recomputes every checkable property of a claimed solution from its q_traj.
SolutionReport verify_solution(const NavigationProblem& prob, const NavigationSolution& sol,
                               std::optional<double> oracle_T = std::nullopt,
                               const VerifyThresholds& thresholds = {});

// Upper bound on travel time used to limit the search: 4·L/(1 − max|W|) with
// L the h-length of the chart segment start→goal.
struct SearchHorizon {
  double segment_length = 0.0;
  double max_wind = 0.0;
  double T_max = 0.0;
};

SearchHorizon search_horizon(const ZermeloData& z, const ChartPoint& start, const ChartPoint& goal);

}  // namespace zermelo
