#include "zermelo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace zermelo {

namespace {

struct HermitePoint {
  Vector x;
  Vector dx;
};

// Cubic Hermite interpolation of the sampled curve at parameter s.
HermitePoint hermite(const Trajectory& curve, double s) {
  const auto& samples = curve.samples;
  auto upper = std::upper_bound(samples.begin(), samples.end(), s,
                                [](double value, const Sample& sample) { return value < sample.t; });
  std::size_t i = upper == samples.begin() ? 0 : static_cast<std::size_t>(upper - samples.begin()) - 1;
  i = std::min(i, samples.size() - 2);
  const Sample& a = samples[i];
  const Sample& b = samples[i + 1];
  const double span = b.t - a.t;
  const double u = (s - a.t) / span;
  const double u2 = u * u, u3 = u2 * u;
  HermitePoint out;
  out.x = (2 * u3 - 3 * u2 + 1) * a.x + (u3 - 2 * u2 + u) * span * a.v + (-2 * u3 + 3 * u2) * b.x +
          (u3 - u2) * span * b.v;
  out.dx = ((6 * u2 - 6 * u) * a.x + (3 * u2 - 4 * u + 1) * span * a.v + (-6 * u2 + 6 * u) * b.x +
            (3 * u2 - 2 * u) * span * b.v) /
           span;
  return out;
}

std::vector<double> uniform_grid(double T, double dt) {
  const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
  std::vector<double> grid(steps + 1);
  for (int i = 0; i <= steps; ++i) grid[i] = T * i / steps;
  return grid;
}

double local_norm(const MetricField& h, const ChartPoint& at, const Vector& v) {
  return std::sqrt(std::max(0.0, v.dot(evaluate_metric(h, at) * v)));
}

}  // namespace

double homothety_arclength(double t, double sigma) {
  if (sigma == 0.0) return t;
  return -2.0 / sigma * std::expm1(-0.5 * sigma * t);
}

Trajectory reparameterize_geodesic(const MetricField& h, const Trajectory& gamma, double sigma,
                                   double T, double dt, double unit_tol) {
  validate(gamma);
  if (gamma.size() < 2) throw Error(ErrorCode::invalid_input, "geodesic needs at least two samples");
  if (!(T > 0.0)) throw Error(ErrorCode::invalid_input, "reparameterization horizon must be positive");
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double speed = local_norm(h, gamma.samples[i].x, gamma.samples[i].v);
    if (std::abs(speed - 1.0) > unit_tol) {
      std::ostringstream os;
      os << "geodesic is not unit speed: |v|_h = " << speed << " at sample " << i;
      throw Error(ErrorCode::invalid_input, os.str());
    }
  }
  const double s0 = gamma.front().t;
  const double s_end = homothety_arclength(T, sigma);
  const double available = gamma.back().t - s0;
  if (s_end > available * (1.0 + 1e-12) + 1e-12) {
    std::ostringstream os;
    os << "geodesic covers arclength " << available << " but " << s_end << " is required";
    throw Error(ErrorCode::invalid_input, os.str());
  }

  Trajectory out;
  out.tag = Parameterization::affine;
  for (double t : uniform_grid(T, dt)) {
    const double s = std::min(s0 + homothety_arclength(t, sigma), gamma.back().t);
    HermitePoint p = hermite(gamma, s);
    out.samples.push_back({t, std::move(p.x), p.dx * std::exp(-0.5 * sigma * t)});
  }
  return out;
}

Trajectory geodesic_to_trajectory(const ZermeloData& z, const Trajectory& p_traj, double /*sigma*/,
                                  double dt) {
  validate(p_traj);
  Trajectory q;
  q.tag = Parameterization::physical;
  q.samples.reserve(p_traj.size());
  for (const Sample& s : p_traj.samples) {
    const FlowResult moved = flow_with_differential(z.W, s.x, s.t, s.v, FlowDirection::forward, dt);
    const ZermeloPoint<double> at = evaluate(z, moved.point);
    q.samples.push_back({s.t, moved.point, at.wind + moved.pushed});
  }
  return q;
}

GeodesicCheck trajectory_to_geodesic(const ZermeloData& z, const Trajectory& q_traj, double sigma,
                                     double dt) {
  validate(q_traj);
  GeodesicCheck check;
  check.p_traj.tag = Parameterization::affine;
  std::vector<double> speed;
  speed.reserve(q_traj.size());
  for (const Sample& s : q_traj.samples) {
    const FlowResult moved = flow_with_differential(z.W, s.x, s.t, s.v, FlowDirection::backward, dt);
    const Vector p_dot = moved.pushed - evaluate_wind(z.W, moved.point);
    speed.push_back(local_norm(z.h, moved.point, p_dot));
    check.speed_law_deviation =
        std::max(check.speed_law_deviation, std::abs(speed.back() - std::exp(-0.5 * sigma * s.t)));
    check.p_traj.samples.push_back({s.t, moved.point, p_dot});
  }

  const auto& p = check.p_traj.samples;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double span = p[i + 1].t - p[i - 1].t;
    const Vector accel = (p[i + 1].v - p[i - 1].v) / span;
    const double log_rate = (std::log(speed[i + 1]) - std::log(speed[i - 1])) / span;
    const Vector r = accel + christoffel_symbols(z.h, p[i].x).contract(p[i].v, p[i].v) - log_rate * p[i].v;
    const double size = local_norm(z.h, p[i].x, r);
    if (size > check.residual) {
      check.residual = size;
      check.worst_sample = i;
    }
  }
  return check;
}

SearchHorizon search_horizon(const ZermeloData& z, const ChartPoint& start, const ChartPoint& goal) {
  constexpr int pieces = 32;
  SearchHorizon horizon;
  const Vector chord = goal - start;
  for (int i = 0; i <= pieces; ++i) {
    const ChartPoint x = start + chord * (static_cast<double>(i) / pieces);
    horizon.max_wind = std::max(horizon.max_wind, wind_norm(z, x));
    if (i < pieces) {
      const ChartPoint mid = start + chord * ((i + 0.5) / pieces);
      horizon.segment_length += local_norm(z.h, mid, chord) / pieces;
    }
  }
  if (!(horizon.max_wind < 1.0)) {
    throw Error(ErrorCode::wind_too_strong, "wind reaches unit h-norm between start and goal");
  }
  horizon.T_max = 4.0 * horizon.segment_length / (1.0 - horizon.max_wind);
  return horizon;
}

namespace {

// Shooting residual in the unknowns (hyperspherical angles..., T).
class InterceptionResidual {
 public:
  InterceptionResidual(const NavigationProblem& prob, double dt)
      : prob_(prob), dt_(dt), frame_(orthonormal_frame(evaluate_metric(prob.z.h, prob.start))) {}

  int dimension() const { return static_cast<int>(prob_.start.size()); }

  Vector direction(const Vector& unknowns) const {
    const int n = dimension();
    std::vector<double> angles(unknowns.data(), unknowns.data() + n - 1);
    return frame_ * unit_from_angles(angles, n);
  }

  Vector frame_coordinates(const Vector& u) const {
    return frame_.triangularView<Eigen::Upper>().solve(u);
  }

  struct Value {
    Vector r;
    double miss;
  };

  Value operator()(const Vector& unknowns) const {
    const int n = dimension();
    const double T = unknowns[n - 1];
    const double s = homothety_arclength(T, prob_.sigma);
    const ChartPoint target = flow_map(prob_.z.W, prob_.goal, T, FlowDirection::backward, dt_);
    const ChartPoint end = integrate_geodesic(prob_.z.h, prob_.start, direction(unknowns), s, dt_).back().x;
    Value value{end - target, 0.0};
    value.miss = local_norm(prob_.z.h, target, value.r);
    return value;
  }

 private:
  const NavigationProblem& prob_;
  double dt_;
  Matrix frame_;
};

struct NewtonOutcome {
  bool converged = false;
  Vector unknowns;
  double miss = 0.0;
};

NewtonOutcome damped_newton(const InterceptionResidual& residual, Vector unknowns, double tol,
                            double T_max, int max_iterations) {
  const int n = residual.dimension();
  NewtonOutcome outcome;
  InterceptionResidual::Value current;
  try {
    current = residual(unknowns);
  } catch (const Error&) {
    return outcome;
  }
  for (int it = 0; it < max_iterations && current.miss > tol; ++it) {
    Matrix J(n, n);
    try {
      for (int c = 0; c < n; ++c) {
        const double step = c == n - 1 ? 1e-6 * std::max(1.0, unknowns[c]) : 1e-6;
        Vector plus = unknowns, minus = unknowns;
        plus[c] += step;
        minus[c] -= step;
        J.col(c) = (residual(plus).r - residual(minus).r) / (2.0 * step);
      }
    } catch (const Error&) {
      return outcome;
    }
    Vector delta = J.colPivHouseholderQr().solve(-current.r);
    if (!delta.allFinite()) return outcome;
    // Trust region: at most half a radian of turn and half the current time.
    const double angle_step = n > 1 ? delta.head(n - 1).cwiseAbs().maxCoeff() : 0.0;
    double limit = 1.0;
    if (angle_step > 0.5) limit = std::min(limit, 0.5 / angle_step);
    if (std::abs(delta[n - 1]) > 0.5 * unknowns[n - 1]) {
      limit = std::min(limit, 0.5 * unknowns[n - 1] / std::abs(delta[n - 1]));
    }
    delta *= limit;

    bool accepted = false;
    for (int halving = 0; halving < 20 && !accepted; ++halving) {
      const Vector trial = unknowns + delta;
      delta *= 0.5;
      if (!(trial[n - 1] > 0.0) || trial[n - 1] > 1.5 * T_max) continue;
      try {
        const InterceptionResidual::Value value = residual(trial);
        if (value.miss < current.miss) {
          unknowns = trial;
          current = value;
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) break;
  }
  outcome.converged = current.miss <= tol;
  outcome.unknowns = unknowns;
  outcome.miss = current.miss;
  return outcome;
}

}  // namespace

NavigationSolution intercept_shoot(const NavigationProblem& prob) {
  const int n = static_cast<int>(prob.start.size());
  if (n < 2) throw Error(ErrorCode::invalid_input, "interception shooting needs dimension >= 2");
  if (prob.goal.size() != n || prob.z.dimension() != n) {
    throw Error(ErrorCode::dimension_mismatch, "problem dimensions disagree");
  }
  if ((prob.goal - prob.start).norm() == 0.0) {
    throw Error(ErrorCode::invalid_input, "start and goal coincide");
  }
  const ShootSettings& settings = prob.settings;
  const SearchHorizon horizon = search_horizon(prob.z, prob.start, prob.goal);

  // Coarse pass over the restarts, then polishing at the working step.
  const double coarse_dt = std::max(settings.ode_dt, 1e-2);
  const double coarse_tol = std::max(settings.shoot_tol, 1e-7);
  const InterceptionResidual coarse(prob, coarse_dt);
  const InterceptionResidual fine(prob, settings.ode_dt);

  Vector bearing = coarse.frame_coordinates(prob.goal - prob.start);
  bearing.normalize();
  // A frame vector orthogonal to the bearing, for fanning out initial guesses.
  Vector side = Vector::Zero(n);
  for (int axis = 0; axis < n && side.norm() < 0.5; ++axis) {
    side = Vector::Unit(n, axis) - bearing[axis] * bearing;
  }
  side.normalize();

  const double w = horizon.max_wind;
  const double T_lo = horizon.segment_length / (1.0 + w);
  const double T_hi = std::min(horizon.T_max, horizon.segment_length / (1.0 - w));
  const int fan = std::max(1, settings.restarts / 2);

  std::vector<InterceptRoot> roots;
  for (int k = 0; k < settings.restarts; ++k) {
    const int slot = k % fan;
    const double offset = slot == 0 ? 0.0
                                    : (slot % 2 ? 1.0 : -1.0) * std::numbers::pi * ((slot + 1) / 2) / fan;
    const Vector guess_dir = std::cos(offset) * bearing + std::sin(offset) * side;
    const double T_guess = T_lo + (T_hi - T_lo) * (1.0 + k / fan) / 3.0;
    Vector unknowns(n);
    const std::vector<double> angles = angles_from_unit(guess_dir);
    for (int i = 0; i < n - 1; ++i) unknowns[i] = angles[i];
    unknowns[n - 1] = T_guess;

    NewtonOutcome rough = damped_newton(coarse, unknowns, coarse_tol, horizon.T_max,
                                        settings.max_newton_iterations);
    if (!rough.converged) continue;
    NewtonOutcome polished = damped_newton(fine, rough.unknowns, settings.shoot_tol, horizon.T_max,
                                           settings.max_newton_iterations);
    if (!polished.converged) continue;
    const double T = polished.unknowns[n - 1];
    if (!(T > 0.0) || T > horizon.T_max) continue;
    const Vector u = fine.direction(polished.unknowns);
    const bool duplicate = std::any_of(roots.begin(), roots.end(), [&](const InterceptRoot& r) {
      return std::abs(r.T - T) < 1e-6 && (r.direction - u).norm() < 1e-5;
    });
    if (!duplicate) roots.push_back({T, u, polished.miss});
  }
  if (roots.empty()) {
    std::ostringstream os;
    os << "no interception found within horizon T_max = " << horizon.T_max << " after "
       << settings.restarts << " restarts";
    throw Error(ErrorCode::no_interception, os.str());
  }
  std::sort(roots.begin(), roots.end(),
            [](const InterceptRoot& a, const InterceptRoot& b) { return a.T < b.T; });

  const InterceptRoot& best = roots.front();
  NavigationSolution sol;
  sol.T = best.T;
  sol.roots = roots;
  const double s_T = homothety_arclength(best.T, prob.sigma);
  const Trajectory gamma = integrate_geodesic(prob.z.h, prob.start, best.direction, s_T, settings.ode_dt);
  sol.p_traj = reparameterize_geodesic(prob.z.h, gamma, prob.sigma, best.T, settings.ode_dt);
  sol.q_traj = geodesic_to_trajectory(prob.z, sol.p_traj, prob.sigma, settings.ode_dt);
  sol.initial_control = sol.q_traj.front().v - evaluate_wind(prob.z.W, sol.q_traj.front().x);
  return sol;
}

SolutionReport verify_solution(const NavigationProblem& prob, const NavigationSolution& sol,
                               std::optional<double> oracle_T, const VerifyThresholds& thresholds) {
  SolutionReport report;
  report.thresholds = thresholds;
  report.T = sol.T;
  const Trajectory& q = sol.q_traj;
  validate(q);
  const double dt = prob.settings.ode_dt;

  report.full_throttle_deviation = verify_full_throttle(prob.z, q, thresholds.full_throttle).max_deviation;
  report.full_throttle_ok = report.full_throttle_deviation <= thresholds.full_throttle;

  const GeodesicCheck geo = trajectory_to_geodesic(prob.z, q, prob.sigma, dt);
  report.geodesic_residual = geo.residual;
  report.speed_law_deviation = geo.speed_law_deviation;
  report.geodesic_ok = geo.residual <= thresholds.geodesic_residual;

  LengthOptions length_options;
  length_options.max_dt = std::max(length_options.max_dt, 10.0 * dt);
  report.randers_length = randers_length(prob.z, q, length_options);
  report.length_error = std::abs(report.randers_length - sol.T);
  report.length_ok = report.length_error <= thresholds.length_relative * sol.T &&
                     std::abs(q.duration() - sol.T) <= thresholds.length_relative * sol.T;

  report.start_error = local_norm(prob.z.h, prob.start, q.front().x - prob.start);
  report.goal_error = local_norm(prob.z.h, prob.goal, q.back().x - prob.goal);
  report.endpoints_ok = report.start_error <= thresholds.endpoint && report.goal_error <= thresholds.endpoint;

  if (oracle_T) {
    report.oracle_T = oracle_T;
    report.oracle_ok = sol.T <= *oracle_T + thresholds.oracle_slack;
  }
  return report;
}

}  // namespace zermelo
