#include "zermelo/randers.hpp"

#include <sstream>

namespace zermelo {

ZermeloPoint<double> evaluate(const ZermeloData& z, const ChartPoint& x) {
  ZermeloPoint<double> p{evaluate_metric(z.h, x), evaluate_wind(z.W, x)};
  if (!(p.wind.dot(p.h * p.wind) < 1.0)) {
    std::ostringstream os;
    os << "wind h-norm " << std::sqrt(p.wind.dot(p.h * p.wind)) << " is not below 1";
    throw Error(ErrorCode::wind_too_strong, os.str());
  }
  return p;
}

RandersPoint<double> evaluate(const RandersData& r, const ChartPoint& x) {
  RandersPoint<double> p{evaluate_metric(r.alpha, x), r.beta(x)};
  if (p.beta.size() != x.size()) {
    throw Error(ErrorCode::dimension_mismatch, "beta dimension does not match point");
  }
  return p;
}

double wind_norm(const ZermeloData& z, const ChartPoint& x) {
  const Matrix h = evaluate_metric(z.h, x);
  const Vector w = evaluate_wind(z.W, x);
  return std::sqrt(w.dot(h * w));
}

double finsler_function(const ZermeloData& z, const ChartPoint& x, const Vector& v) {
  const Matrix h = evaluate_metric(z.h, x);
  const Vector w = evaluate_wind(z.W, x);
  if (v.size() != x.size()) throw Error(ErrorCode::dimension_mismatch, "vector dimension mismatch");
  return navigation_speed(h, w, v);
}

RandersData zermelo_to_randers(const ZermeloData& z) {
  RandersData r;
  r.alpha.dimension = z.dimension();
  r.alpha.evaluator = [z](const ChartPoint& x) -> Matrix {
    return to_randers(evaluate_metric(z.h, x), evaluate_wind(z.W, x)).alpha;
  };
  r.beta = [z](const ChartPoint& x) -> Vector {
    return to_randers(evaluate_metric(z.h, x), evaluate_wind(z.W, x)).beta;
  };
  return r;
}

ZermeloData randers_to_zermelo(const RandersData& r) {
  ZermeloData z;
  z.h.dimension = r.dimension();
  z.h.evaluator = [r](const ChartPoint& x) -> Matrix {
    const RandersPoint<double> p = evaluate(r, x);
    return to_zermelo(p.alpha, p.beta).h;
  };
  z.W.dimension = r.dimension();
  z.W.evaluator = [r](const ChartPoint& x) -> Vector {
    const RandersPoint<double> p = evaluate(r, x);
    return to_zermelo(p.alpha, p.beta).wind;
  };
  return z;
}

double randers_speed(const RandersData& r, const ChartPoint& x, const Vector& y) {
  const RandersPoint<double> p = evaluate(r, x);
  return zermelo::randers_speed(p.alpha, p.beta, y);
}

Matrix fundamental_tensor(const RandersData& r, const ChartPoint& x, const Vector& y) {
  const RandersPoint<double> p = evaluate(r, x);
  return fundamental_tensor_at(p.alpha, p.beta, y);
}

double randers_length(const ZermeloData& z, const Trajectory& traj, const LengthOptions& options) {
  validate(traj);
  const std::size_t count = traj.size();
  std::vector<double> speed(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Sample& s = traj.samples[i];
    const bool endpoint = i == 0 || i + 1 == count;
    if (options.stationary_endpoints && endpoint && s.v.isZero(0.0)) {
      speed[i] = 0.0;
      continue;
    }
    try {
      speed[i] = finsler_function(z, s.x, s.v);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::undefined_input) throw;
      throw Error(ErrorCode::undefined_input,
                  "zero velocity at trajectory sample " + std::to_string(i));
    }
  }
  double total = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    const double dt = traj.samples[i].t - traj.samples[i - 1].t;
    if (dt > options.max_dt) {
      std::ostringstream os;
      os << "trajectory too coarse for quadrature: step " << dt << " exceeds " << options.max_dt;
      throw Error(ErrorCode::invalid_input, os.str());
    }
    total += 0.5 * dt * (speed[i] + speed[i - 1]);
  }
  return total;
}

ThrottleReport verify_full_throttle(const ZermeloData& z, const Trajectory& traj, double tol) {
  validate(traj);
  ThrottleReport report;
  report.tolerance = tol;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Sample& s = traj.samples[i];
    const Matrix h = evaluate_metric(z.h, s.x);
    const Vector control = s.v - evaluate_wind(z.W, s.x);
    const double deviation = std::abs(std::sqrt(control.dot(h * control)) - 1.0);
    if (deviation > report.max_deviation) {
      report.max_deviation = deviation;
      report.worst_sample = i;
    }
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

}  // namespace zermelo
