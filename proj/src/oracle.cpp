#include "zermelo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace zermelo {

namespace {

// W(q) + E(q)·heading with E = L⁻ᵀ the upper-triangular orthonormal frame.
Vector control_velocity(const ZermeloData& z, const ChartPoint& q, const Vector& heading) {
  const Eigen::LLT<Matrix> llt(evaluate_metric(z.h, q));
  return evaluate_wind(z.W, q) + llt.matrixU().solve(heading);
}

// RK4 over `steps_per_segment` equal steps on each of the K segments.
template <typename Visit>
ChartPoint integrate_schedule(const ZermeloData& z, const ChartPoint& x0, const std::vector<Vector>& headings,
                              double T, int steps_per_segment, Visit&& visit) {
  const int K = static_cast<int>(headings.size());
  const double step = T / (static_cast<double>(K) * steps_per_segment);
  Vector q = x0;
  for (int k = 0; k < K; ++k) {
    const Vector& c = headings[k];
    for (int s = 0; s < steps_per_segment; ++s) {
      const Vector k1 = control_velocity(z, q, c);
      visit(k, s, q, k1);
      const Vector k2 = control_velocity(z, q + 0.5 * step * k1, c);
      const Vector k3 = control_velocity(z, q + 0.5 * step * k2, c);
      const Vector k4 = control_velocity(z, q + step * k3, c);
      q += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return q;
}

// Flat list of K·(n−1) hyperspherical angles.
using Angles = std::vector<double>;

std::vector<Vector> headings_from(const Angles& angles, int K, int n) {
  std::vector<Vector> headings;
  headings.reserve(K);
  for (int k = 0; k < K; ++k) {
    headings.push_back(unit_from_angles(std::span<const double>(angles.data() + k * (n - 1), n - 1), n));
  }
  return headings;
}

Angles refine(const Angles& coarse, int n) {
  const int per = n - 1;
  Angles fine;
  fine.reserve(coarse.size() * 2);
  for (std::size_t k = 0; k * per < coarse.size(); ++k) {
    for (int copy = 0; copy < 2; ++copy) {
      fine.insert(fine.end(), coarse.begin() + k * per, coarse.begin() + (k + 1) * per);
    }
  }
  return fine;
}

struct Candidate {
  Angles angles;
  double miss = std::numeric_limits<double>::infinity();
};

// Bisection state for one oracle run. Warm starts are kept per level so that a
// level behaves identically whether it runs on its own or nested under a finer
// K, which makes the finer oracle at least as good as the coarse one.
class FeasibilitySearch {
 public:
  FeasibilitySearch(const ZermeloData& z, const ChartPoint& x0, const ChartPoint& goal,
                    const OracleSettings& settings)
      : z_(z), x0_(x0), goal_(goal), settings_(settings), n_(static_cast<int>(x0.size())),
        goal_factor_(Eigen::LLT<Matrix>(evaluate_metric(z.h, goal)).matrixU()) {
    Vector bearing = orthonormal_frame(evaluate_metric(z.h, x0)).triangularView<Eigen::Upper>().solve(
        Vector(goal - x0));
    bearing.normalize();
    bearing_ = angles_from_unit(bearing);
  }

  Candidate search(int K, double T) {
    std::vector<Angles> seeds;
    if (K % 2 == 0) {
      const Candidate coarse = search(K / 2, T);
      Angles refined = refine(coarse.angles, n_);
      if (coarse.miss <= settings_.tol) return {std::move(refined), coarse.miss};
      seeds.push_back(std::move(refined));
    }
    if (auto it = warm_.find(K); it != warm_.end()) seeds.push_back(it->second);
    Angles toward;
    for (int k = 0; k < K; ++k) toward.insert(toward.end(), bearing_.begin(), bearing_.end());
    seeds.push_back(std::move(toward));

    std::mt19937_64 rng(settings_.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(K));
    std::uniform_real_distribution<double> polar(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> azimuth(-std::numbers::pi, std::numbers::pi);
    while (static_cast<int>(seeds.size()) < std::max(settings_.restarts, 1)) {
      Angles a(K * (n_ - 1));
      for (int k = 0; k < K; ++k) {
        for (int i = 0; i < n_ - 1; ++i) a[k * (n_ - 1) + i] = i + 2 == n_ ? azimuth(rng) : polar(rng);
      }
      seeds.push_back(std::move(a));
    }

    const int steps = steps_per_segment(K, T);
    std::vector<Candidate> screened;
    screened.reserve(seeds.size());
    for (Angles& seed : seeds) {
      Candidate c{std::move(seed), 0.0};
      c.miss = descend(c.angles, K, T, steps, kScreenIterations);
      if (c.miss <= settings_.tol) {
        warm_[K] = c.angles;
        return c;
      }
      screened.push_back(std::move(c));
    }
    std::stable_sort(screened.begin(), screened.end(),
                     [](const Candidate& a, const Candidate& b) { return a.miss < b.miss; });
    Candidate best;
    const std::size_t polish = std::min<std::size_t>(kPolished, screened.size());
    for (std::size_t i = 0; i < polish; ++i) {
      Candidate& c = screened[i];
      c.miss = descend(c.angles, K, T, steps, kPolishIterations);
      if (c.miss < best.miss) best = c;
      if (best.miss <= settings_.tol) break;
    }
    warm_[K] = best.angles;
    return best;
  }

  // Steps per segment on a time grid shared by every level that divides 16,
  // so a refined coarse schedule reproduces its coarse endpoint exactly.
  int steps_per_segment(int K, double T) const {
    const int block = kGridBlock % K == 0 ? kGridBlock : K;
    const int blocks = std::max(1, static_cast<int>(std::ceil(T / (block * settings_.dt) - 1e-12)));
    return blocks * block / K;
  }

  long simulations = 0;

 private:
  static constexpr int kGridBlock = 16;
  static constexpr int kScreenIterations = 3;
  static constexpr int kPolishIterations = 60;
  static constexpr std::size_t kPolished = 3;
  static constexpr double kStallIterations = 20.0;
  static constexpr double kJacobianStep = 1e-7;
  static constexpr double kMaxStep = 1.0;

  // Levenberg–Marquardt on the metric-weighted endpoint residual. There are
  // more angles than residual components, so each step is the damped
  // minimum-norm solution δ = −Jᵀ(JJᵀ + μI)⁻¹r. Returns the final miss.
  double descend(Angles& angles, int K, double T, int steps, int iterations) {
    const auto m = static_cast<Eigen::Index>(angles.size());
    Vector r = residual(angles, K, T, steps);
    double f = r.norm();
    double mu = 1e-3 * std::max(f * f, 1e-12);
    if (!std::isfinite(f)) return f;
    Matrix J(n_, m);
    for (int it = 0; it < iterations && f > settings_.tol; ++it) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const double a0 = angles[j];
        angles[j] = a0 + kJacobianStep;
        J.col(j) = (residual(angles, K, T, steps) - r) / kJacobianStep;
        angles[j] = a0;
      }
      if (!J.allFinite()) break;
      const Matrix JJt = J * J.transpose();
      const double f_before = f;
      bool accepted = false;
      for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
        const Matrix damped = JJt + mu * Matrix::Identity(n_, n_);
        Vector step = -J.transpose() * damped.ldlt().solve(r);
        const double len = step.norm();
        if (len > kMaxStep) step *= kMaxStep / len;
        Angles trial = angles;
        for (Eigen::Index j = 0; j < m; ++j) trial[j] += step[j];
        const Vector r_trial = residual(trial, K, T, steps);
        const double f_trial = r_trial.norm();
        if (f_trial < f) {
          angles = std::move(trial);
          r = r_trial;
          f = f_trial;
          mu = std::max(mu / 4.0, 1e-16);
          accepted = true;
        } else {
          mu *= 8.0;
        }
      }
      if (!accepted) break;
      // Stop when the latest rate of decrease would need more than
      // kStallIterations further iterations to reach the tolerance.
      if (f > settings_.tol &&
          std::log(f / settings_.tol) > kStallIterations * std::log(f_before / f)) {
        break;
      }
    }
    return f;
  }

  // A schedule that leaves the chart misses by +inf.
  Vector residual(const Angles& angles, int K, double T, int steps) {
    ++simulations;
    try {
      const ChartPoint end = integrate_schedule(z_, x0_, headings_from(angles, K, n_), T, steps,
                                                [](int, int, const Vector&, const Vector&) {});
      return goal_factor_ * (end - goal_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain_exit) throw;
      return Vector::Constant(n_, std::numeric_limits<double>::infinity());
    }
  }

  const ZermeloData& z_;
  ChartPoint x0_, goal_;
  OracleSettings settings_;
  int n_;
  Matrix goal_factor_;  // Lᵀ with h(goal) = L Lᵀ, so |Lᵀd| is the h-norm of d
  Angles bearing_;
  std::map<int, Angles> warm_;
};

}  // namespace

Trajectory simulate_control(const ZermeloData& z, const ChartPoint& x0, const ControlSchedule& sched,
                            double dt) {
  const int K = sched.segments();
  if (K < 1) throw Error(ErrorCode::invalid_input, "control schedule needs at least one heading");
  if (!(sched.T > 0.0)) throw Error(ErrorCode::invalid_input, "control schedule duration must be positive");
  for (const Vector& c : sched.headings) {
    if (c.size() != x0.size()) throw Error(ErrorCode::dimension_mismatch, "heading dimension mismatch");
    if (std::abs(c.norm() - 1.0) > 1e-9) throw Error(ErrorCode::invalid_input, "heading is not a unit vector");
  }
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_input, "integration step must be positive");
  const int steps = std::max(1, static_cast<int>(std::ceil(sched.T / (K * dt) - 1e-9)));
  const double step = sched.T / (static_cast<double>(K) * steps);

  Trajectory out;
  out.tag = Parameterization::physical;
  out.samples.reserve(static_cast<std::size_t>(K) * steps + 1);
  const ChartPoint end = integrate_schedule(
      z, x0, sched.headings, sched.T, steps, [&](int k, int s, const Vector& q, const Vector& v) {
        out.samples.push_back({(static_cast<double>(k) * steps + s) * step, q, v});
      });
  out.samples.push_back({sched.T, end, control_velocity(z, end, sched.headings.back())});
  return out;
}

OracleResult oracle_min_time(const ZermeloData& z, const ChartPoint& x0, const ChartPoint& x_goal,
                             const OracleSettings& settings) {
  const int n = static_cast<int>(x0.size());
  if (settings.K < 1) throw Error(ErrorCode::invalid_input, "oracle needs K >= 1");
  if (n < 2) throw Error(ErrorCode::invalid_input, "oracle needs dimension >= 2");
  if (x_goal.size() != n) throw Error(ErrorCode::dimension_mismatch, "goal dimension mismatch");

  OracleResult result;
  if ((x_goal - x0).norm() == 0.0) return result;

  const SearchHorizon horizon = search_horizon(z, x0, x_goal);
  FeasibilitySearch search(z, x0, x_goal, settings);
  auto feasible = [&](double T, Candidate& out) {
    ++result.feasibility_checks;
    try {
      out = search.search(settings.K, T);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain_exit) throw;
      out = Candidate{};
      return false;
    }
    return out.miss <= settings.tol;
  };

  Candidate witness;
  if (!feasible(horizon.T_max, witness)) {
    std::ostringstream os;
    os << "goal not reachable within the horizon T_max = " << horizon.T_max << " (best miss "
       << witness.miss << ")";
    throw Error(ErrorCode::infeasible, os.str());
  }
  double lo = 0.0, hi = horizon.T_max;
  for (int i = 0; i < settings.bisection_depth; ++i) {
    const double mid = 0.5 * (lo + hi);
    Candidate trial;
    if (feasible(mid, trial)) {
      hi = mid;
      witness = std::move(trial);
    } else {
      lo = mid;
    }
  }
  result.T = hi;
  result.miss = witness.miss;
  result.witness.T = hi;
  result.witness.headings = headings_from(witness.angles, settings.K, n);
  return result;
}

Certification compare_with_solver(const NavigationProblem& prob, const NavigationSolution& sol,
                                  const OracleSettings& settings) {
  Certification cert;
  cert.oracle = oracle_min_time(prob.z, prob.start, prob.goal, settings);
  cert.solver_T = sol.T;
  cert.oracle_T = cert.oracle.T;
  cert.gap = cert.solver_T - cert.oracle_T;
  cert.slack = settings.slack;
  cert.certified = cert.solver_T <= cert.oracle_T + cert.slack;
  return cert;
}

NavigationSolution perturbed_solution(const NavigationProblem& prob, const NavigationSolution& sol,
                                      double angle, double leg_fraction) {
  if (!(leg_fraction > 0.0 && leg_fraction < 1.0)) {
    throw Error(ErrorCode::invalid_input, "leg fraction must lie in (0, 1)");
  }
  const Matrix frame = orthonormal_frame(evaluate_metric(prob.z.h, prob.start));
  std::vector<double> angles =
      angles_from_unit(frame.triangularView<Eigen::Upper>().solve(sol.initial_control).normalized());
  angles.back() += angle;
  const int n = static_cast<int>(prob.start.size());

  ControlSchedule leg_schedule{{unit_from_angles(angles, n)}, leg_fraction * sol.T};
  const Trajectory leg = simulate_control(prob.z, prob.start, leg_schedule, prob.settings.ode_dt);

  NavigationProblem rest = prob;
  rest.start = leg.back().x;
  const NavigationSolution tail = intercept_shoot(rest);

  NavigationSolution out;
  out.T = leg_schedule.T + tail.T;
  out.roots = tail.roots;
  out.q_traj.tag = Parameterization::physical;
  out.q_traj.samples = leg.samples;
  for (std::size_t i = 1; i < tail.q_traj.size(); ++i) {
    Sample s = tail.q_traj.samples[i];
    s.t += leg_schedule.T;
    out.q_traj.samples.push_back(std::move(s));
  }
  out.initial_control = leg.front().v - evaluate_wind(prob.z.W, prob.start);
  out.p_traj = trajectory_to_geodesic(prob.z, out.q_traj, prob.sigma, prob.settings.ode_dt).p_traj;
  return out;
}

}  // namespace zermelo
