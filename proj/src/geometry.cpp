#include "zermelo/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace zermelo {

Matrix MetricField::operator()(const ChartPoint& x) const { return evaluator(x); }
Vector WindField::operator()(const ChartPoint& x) const { return evaluator(x); }

const char* to_string(Parameterization tag) {
  switch (tag) {
    case Parameterization::physical: return "physical";
    case Parameterization::affine: return "affine";
    case Parameterization::arclength: return "arclength";
  }
  return "unknown";
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::non_invertible: return "NON_INVERTIBLE";
    case ErrorCode::domain_exit: return "DOMAIN_EXIT";
    case ErrorCode::not_homothety: return "NOT_HOMOTHETY";
    case ErrorCode::undefined_input: return "UNDEFINED_INPUT";
    case ErrorCode::wind_too_strong: return "WIND_TOO_STRONG";
    case ErrorCode::invalid_randers: return "INVALID_RANDERS";
    case ErrorCode::invalid_input: return "INVALID_INPUT";
    case ErrorCode::no_interception: return "NO_INTERCEPTION";
    case ErrorCode::infeasible: return "INFEASIBLE";
    case ErrorCode::non_convergence: return "NON_CONVERGENCE";
    case ErrorCode::parse_error: return "PARSE_ERROR";
    case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::io_error: return "IO_ERROR";
  }
  return "UNKNOWN";
}

void validate(const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorCode::invalid_input, "empty trajectory");
  const auto n = traj.front().x.size();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Sample& s = traj.samples[i];
    if (s.x.size() != n || s.v.size() != n) {
      throw Error(ErrorCode::dimension_mismatch,
                  "trajectory sample " + std::to_string(i) + " has inconsistent dimension");
    }
    if (i > 0 && !(s.t > traj.samples[i - 1].t)) {
      throw Error(ErrorCode::invalid_input,
                  "trajectory times not strictly increasing at sample " + std::to_string(i));
    }
  }
}

namespace {

std::string describe(const ChartPoint& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

int step_count(double T, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_input, "integration step must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::abs(T) / dt - 1e-9)));
}

// Rethrows evaluation failures met while integrating as domain exits.
template <typename Fn>
auto guarded(Fn&& fn, double t) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::domain_exit) throw;
    std::ostringstream os;
    os << "integration left the chart at t=" << t << ": " << e.what();
    throw Error(ErrorCode::domain_exit, os.str());
  }
}

}  // namespace

Matrix evaluate_metric(const MetricField& h, const ChartPoint& x) {
  if (!x.allFinite()) throw Error(ErrorCode::domain_exit, "non-finite chart point");
  Matrix m = h(x);
  if (m.rows() != x.size() || m.cols() != x.size()) {
    throw Error(ErrorCode::dimension_mismatch, "metric dimension does not match point " + describe(x));
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::domain_exit, "metric not finite at " + describe(x));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_input, "metric not symmetric at " + describe(x));
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::non_invertible, "metric not positive-definite at " + describe(x));
  }
  return m;
}

Vector evaluate_wind(const WindField& W, const ChartPoint& x) {
  if (!x.allFinite()) throw Error(ErrorCode::domain_exit, "non-finite chart point");
  Vector w = W(x);
  if (w.size() != x.size()) {
    throw Error(ErrorCode::dimension_mismatch, "wind dimension does not match point " + describe(x));
  }
  if (!w.allFinite()) throw Error(ErrorCode::domain_exit, "wind not finite at " + describe(x));
  return w;
}

std::vector<Matrix> metric_partials(const MetricField& h, const ChartPoint& x) {
  const auto n = x.size();
  const double step = fd_step(x);
  std::vector<Matrix> out;
  out.reserve(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    ChartPoint xp = x, xm = x;
    xp[l] += step;
    xm[l] -= step;
    out.push_back((evaluate_metric(h, xp) - evaluate_metric(h, xm)) / (2.0 * step));
  }
  return out;
}

Matrix wind_jacobian(const WindField& W, const ChartPoint& x) {
  const auto n = x.size();
  const double step = fd_step(x);
  Matrix J(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    ChartPoint xp = x, xm = x;
    xp[b] += step;
    xm[b] -= step;
    J.col(b) = (evaluate_wind(W, xp) - evaluate_wind(W, xm)) / (2.0 * step);
  }
  return J;
}

Vector Christoffel::contract(const Vector& a, const Vector& b) const {
  Vector out(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) out[k] = a.dot(blocks[k] * b);
  return out;
}

Christoffel christoffel_symbols(const MetricField& h, const ChartPoint& x) {
  const int n = static_cast<int>(x.size());
  const Matrix hx = evaluate_metric(h, x);
  Eigen::FullPivLU<Matrix> lu(hx);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::non_invertible, "metric singular at " + describe(x));
  }
  const Matrix hinv = lu.inverse();
  const std::vector<Matrix> dh = metric_partials(h, x);

  Christoffel gamma;
  gamma.blocks.assign(n, Matrix::Zero(n, n));
  // Lowered symbols Γ_lij = ½(∂_i h_jl + ∂_j h_il − ∂_l h_ij); only i ≤ j is
  // computed so the symmetry in (i, j) holds exactly.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vector lowered(n);
      for (int l = 0; l < n; ++l) {
        lowered[l] = 0.5 * (dh[i](j, l) + dh[j](i, l) - dh[l](i, j));
      }
      const Vector raised = hinv * lowered;
      for (int k = 0; k < n; ++k) {
        gamma.blocks[k](i, j) = raised[k];
        gamma.blocks[k](j, i) = raised[k];
      }
    }
  }
  return gamma;
}

Trajectory integrate_geodesic(const MetricField& h, const ChartPoint& x0, const Vector& v0,
                              double T, double dt) {
  if (!(T > 0.0)) throw Error(ErrorCode::invalid_input, "geodesic duration must be positive");
  if (x0.size() != v0.size()) {
    throw Error(ErrorCode::dimension_mismatch, "initial point and velocity differ in dimension");
  }
  const int steps = step_count(T, dt);
  const double step = T / steps;

  auto accel = [&](const Vector& x, const Vector& v, double t) -> Vector {
    return guarded([&] { return Vector(-christoffel_symbols(h, x).contract(v, v)); }, t);
  };

  Trajectory out;
  out.tag = Parameterization::affine;
  out.samples.reserve(steps + 1);
  Vector x = x0, v = v0;
  out.samples.push_back({0.0, x, v});
  for (int s = 0; s < steps; ++s) {
    const double t = s * step;
    const Vector k1x = v;
    const Vector k1v = accel(x, v, t);
    const Vector k2x = v + 0.5 * step * k1v;
    const Vector k2v = accel(x + 0.5 * step * k1x, k2x, t + 0.5 * step);
    const Vector k3x = v + 0.5 * step * k2v;
    const Vector k3v = accel(x + 0.5 * step * k2x, k3x, t + 0.5 * step);
    const Vector k4x = v + step * k3v;
    const Vector k4v = accel(x + step * k3x, k4x, t + step);
    x += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    out.samples.push_back({(s + 1) * step, x, v});
  }
  // Confirms the endpoint is still inside the chart.
  guarded([&] { return evaluate_metric(h, x); }, T);
  return out;
}

ChartPoint flow_map(const WindField& W, const ChartPoint& x0, double t, FlowDirection direction,
                    double dt) {
  if (t == 0.0) return x0;
  const int steps = step_count(t, dt);
  const double step = t / steps;
  const double sign = static_cast<int>(direction);
  auto f = [&](const Vector& x, double time) -> Vector {
    return guarded([&] { return Vector(sign * evaluate_wind(W, x)); }, time);
  };
  Vector x = x0;
  for (int s = 0; s < steps; ++s) {
    const double time = s * step;
    const Vector k1 = f(x, time);
    const Vector k2 = f(x + 0.5 * step * k1, time + 0.5 * step);
    const Vector k3 = f(x + 0.5 * step * k2, time + 0.5 * step);
    const Vector k4 = f(x + step * k3, time + step);
    x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

FlowResult flow_with_differential(const WindField& W, const ChartPoint& x0, double t,
                                  const Vector& v, FlowDirection direction, double dt) {
  if (x0.size() != v.size()) {
    throw Error(ErrorCode::dimension_mismatch, "point and vector differ in dimension");
  }
  if (t == 0.0) return {x0, v};
  const int steps = step_count(t, dt);
  const double step = t / steps;
  const double sign = static_cast<int>(direction);

  struct State {
    Vector x, d;
  };
  auto f = [&](const Vector& x, const Vector& d, double time) -> State {
    return guarded(
        [&] {
          return State{sign * evaluate_wind(W, x), sign * (wind_jacobian(W, x) * d)};
        },
        time);
  };
  Vector x = x0, d = v;
  for (int s = 0; s < steps; ++s) {
    const double time = s * step;
    const State k1 = f(x, d, time);
    const State k2 = f(x + 0.5 * step * k1.x, d + 0.5 * step * k1.d, time + 0.5 * step);
    const State k3 = f(x + 0.5 * step * k2.x, d + 0.5 * step * k2.d, time + 0.5 * step);
    const State k4 = f(x + step * k3.x, d + step * k3.d, time + step);
    x += step / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    d += step / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
  }
  return {x, d};
}

Vector flow_differential(const WindField& W, const ChartPoint& x0, double t, const Vector& v,
                         FlowDirection direction, double dt) {
  return flow_with_differential(W, x0, t, v, direction, dt).pushed;
}

Matrix lie_derivative_metric(const MetricField& h, const WindField& W, const ChartPoint& x) {
  const auto n = x.size();
  const Matrix hx = evaluate_metric(h, x);
  const Vector w = evaluate_wind(W, x);
  const std::vector<Matrix> dh = metric_partials(h, x);
  const Matrix J = wind_jacobian(W, x);  // J(k, i) = ∂_i W^k

  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) L += w[k] * dh[k];
  // h_kj ∂_i W^k = (Jᵀ h)_ij, and its transpose for the second index.
  const Matrix JtH = J.transpose() * hx;
  L += JtH + JtH.transpose();
  return L;
}

HomothetyEstimate homothety_sigma(const MetricField& h, const WindField& W,
                                  std::span<const ChartPoint> sample_points, double tol) {
  if (sample_points.empty()) {
    throw Error(ErrorCode::invalid_input, "homothety test needs at least one sample point");
  }
  HomothetyEstimate est;
  double c_min = std::numeric_limits<double>::infinity();
  double c_max = -c_min;
  double c_sum = 0.0;
  for (const ChartPoint& x : sample_points) {
    const Matrix hx = evaluate_metric(h, x);
    const Matrix L = lie_derivative_metric(h, W, x);
    const double hh = hx.squaredNorm();
    const double c = (L.array() * hx.array()).sum() / hh;
    const double residual = (L - c * hx).norm() / std::sqrt(hh);
    if (residual >= est.worst_residual) {
      est.worst_residual = residual;
      est.worst_point = x;
    }
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
    c_sum += c;
  }
  est.spread = c_max - c_min;
  est.sigma = c_sum / static_cast<double>(sample_points.size());
  if (est.worst_residual > tol || est.spread > tol) {
    std::ostringstream os;
    os << "wind is not an infinitesimal homothety: worst residual " << est.worst_residual
       << " at " << describe(est.worst_point) << ", sigma spread " << est.spread
       << " (tol " << tol << ")";
    throw NotHomothety(os.str(), est.worst_residual, est.spread);
  }
  return est;
}

double h_norm(const MetricField& h, const ChartPoint& x, const Vector& v) {
  const Matrix hx = evaluate_metric(h, x);
  return std::sqrt(std::max(0.0, v.dot(hx * v)));
}

double h_norm(const MetricField& h, const TangentVector& v) {
  if (v.base.size() != v.components.size()) {
    throw Error(ErrorCode::dimension_mismatch, "tangent vector dimension differs from its base");
  }
  return h_norm(h, v.base, v.components);
}

Matrix orthonormal_frame(const Matrix& h_at_x) {
  Eigen::LLT<Matrix> llt(h_at_x);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::non_invertible, "metric not positive-definite");
  }
  // h = L Lᵀ, so E = L⁻ᵀ is upper triangular with Eᵀ h E = I, which is what
  // Gram–Schmidt on e_1, e_2, ... produces.
  const Matrix Lmat = llt.matrixL();
  return Lmat.transpose().triangularView<Eigen::Upper>().solve(
      Matrix::Identity(h_at_x.rows(), h_at_x.cols()));
}

Vector unit_from_angles(std::span<const double> angles, int n) {
  if (static_cast<int>(angles.size()) != n - 1) {
    throw Error(ErrorCode::dimension_mismatch, "expected n-1 hyperspherical angles");
  }
  Vector u(n);
  double prefix = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    u[i] = prefix * std::cos(angles[i]);
    prefix *= std::sin(angles[i]);
  }
  u[n - 1] = prefix;
  return u;
}

std::vector<double> angles_from_unit(const Vector& u) {
  const auto n = u.size();
  std::vector<double> angles(n > 0 ? n - 1 : 0);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double tail = u.tail(n - i - 1).norm();
    if (i + 2 == n) {
      angles[i] = std::atan2(u[n - 1], u[n - 2]);
    } else {
      angles[i] = std::atan2(tail, u[i]);
    }
  }
  return angles;
}

}  // namespace zermelo
