#pragma once

#include <cmath>
#include <functional>

#include "zermelo/errors.hpp"
#include "zermelo/geometry.hpp"
#include "zermelo/types.hpp"

namespace zermelo {

// ---------------------------------------------------------------------------
// Pointwise algebra. These operate on the metric, wind and Randers data frozen
// at a single chart point and accept any Eigen expression.
// ---------------------------------------------------------------------------

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct RandersPoint {
  DenseMatrix<Scalar> alpha;
  DenseVector<Scalar> beta;  // covector components β_i
};

template <typename Scalar>
struct ZermeloPoint {
  DenseMatrix<Scalar> h;
  DenseVector<Scalar> wind;  // vector components W^i
};

/// Minimum time to reach the tip of v under metric h and wind w: the unique
/// F > 0 with |v/F − w|_h = 1.
template <typename DerivedH, typename DerivedW, typename DerivedV>
typename DerivedV::Scalar navigation_speed(const Eigen::MatrixBase<DerivedH>& h,
                                           const Eigen::MatrixBase<DerivedW>& w,
                                           const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedV::Scalar;
  using std::sqrt;
  const Scalar vv = v.dot(h * v);
  if (!(vv > Scalar(0))) throw Error(ErrorCode::undefined_input, "Finsler function needs v != 0");
  const Scalar ww = w.dot(h * w);
  const Scalar lambda = Scalar(1) - ww;
  if (!(lambda > Scalar(0))) throw Error(ErrorCode::wind_too_strong, "wind h-norm must be below 1");
  const Scalar vw = v.dot(h * w);
  return (-vw + sqrt(vw * vw + vv * lambda)) / lambda;
}

/// α_ij = h_ij/λ + W_iW_j/λ², β_i = −W_i/λ with λ = 1 − |W|², W_i = h_ij W^j.
template <typename DerivedH, typename DerivedW>
RandersPoint<typename DerivedH::Scalar> to_randers(const Eigen::MatrixBase<DerivedH>& h,
                                                   const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedH::Scalar;
  const DenseVector<Scalar> w_lower = h * w;
  const Scalar lambda = Scalar(1) - w.dot(w_lower);
  if (!(lambda > Scalar(0))) throw Error(ErrorCode::wind_too_strong, "wind h-norm must be below 1");
  RandersPoint<Scalar> r;
  r.alpha = h / lambda + (w_lower * w_lower.transpose()) / (lambda * lambda);
  r.beta = -w_lower / lambda;
  return r;
}

/// Inverse of to_randers: with b² = α^{ij}β_iβ_j and ε = 1 − b²,
/// h = ε(α − ββᵀ) and W = −α⁻¹β/ε.
template <typename DerivedA, typename DerivedB>
ZermeloPoint<typename DerivedA::Scalar> to_zermelo(const Eigen::MatrixBase<DerivedA>& alpha,
                                                   const Eigen::MatrixBase<DerivedB>& beta) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::LDLT<DenseMatrix<Scalar>> ldlt(alpha);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorCode::invalid_randers, "alpha is not positive-definite");
  }
  const DenseVector<Scalar> beta_raised = ldlt.solve(DenseVector<Scalar>(beta));
  const Scalar eps = Scalar(1) - beta.dot(beta_raised);
  if (!(eps > Scalar(0))) throw Error(ErrorCode::invalid_randers, "alpha-norm of beta must be below 1");
  ZermeloPoint<Scalar> z;
  z.h = eps * (alpha - beta * beta.transpose());
  z.wind = -beta_raised / eps;
  return z;
}

/// sqrt(α(y, y)) + β(y)
template <typename DerivedA, typename DerivedB, typename DerivedY>
typename DerivedY::Scalar randers_speed(const Eigen::MatrixBase<DerivedA>& alpha,
                                        const Eigen::MatrixBase<DerivedB>& beta,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  using std::sqrt;
  return sqrt(y.dot(alpha * y)) + beta.dot(y);
}

/// Hessian ½∂²F²/∂y∂y of the Randers function at y ≠ 0:
///   g_ij = α_ij + β_iβ_j + (α_ij β_k + α_jk β_i + α_ki β_j) y^k / a
///          − (β_m y^m)(α_ik y^k)(α_jl y^l) / a³,      a = sqrt(α(y, y)).
/// The last term enters with a minus sign, which is what g(y, y) = F² requires.
template <typename DerivedA, typename DerivedB, typename DerivedY>
DenseMatrix<typename DerivedY::Scalar> fundamental_tensor_at(const Eigen::MatrixBase<DerivedA>& alpha,
                                                             const Eigen::MatrixBase<DerivedB>& beta,
                                                             const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedY::Scalar;
  using std::sqrt;
  const DenseVector<Scalar> ay = alpha * y;
  const Scalar a2 = y.dot(ay);
  if (!(a2 > Scalar(0))) throw Error(ErrorCode::undefined_input, "fundamental tensor needs y != 0");
  const Scalar a = sqrt(a2);
  const Scalar by = beta.dot(y);
  DenseMatrix<Scalar> g = alpha + beta * beta.transpose();
  g += (alpha * by + ay * beta.transpose() + beta * ay.transpose()) / a;
  g -= by * (ay * ay.transpose()) / (a2 * a);
  return g;
}

// ---------------------------------------------------------------------------
// Field-level data.
// ---------------------------------------------------------------------------

struct ZermeloData {
  MetricField h;
  WindField W;

  int dimension() const { return h.dimension; }
};

struct RandersData {
  MetricField alpha;
  std::function<Vector(const ChartPoint&)> beta;

  int dimension() const { return alpha.dimension; }
};

// Metric and wind at x, with |W|_h < 1 enforced.
ZermeloPoint<double> evaluate(const ZermeloData& z, const ChartPoint& x);
RandersPoint<double> evaluate(const RandersData& r, const ChartPoint& x);

double wind_norm(const ZermeloData& z, const ChartPoint& x);

double finsler_function(const ZermeloData& z, const ChartPoint& x, const Vector& v);

// The returned fields evaluate lazily; a point with |W| ≥ 1 raises
// wind_too_strong when the converted data is evaluated there.
RandersData zermelo_to_randers(const ZermeloData& z);
ZermeloData randers_to_zermelo(const RandersData& r);

double randers_speed(const RandersData& r, const ChartPoint& x, const Vector& y);

Matrix fundamental_tensor(const RandersData& r, const ChartPoint& x, const Vector& y);

struct LengthOptions {
  double max_dt = 0.05;
  // Zero velocity is accepted at the first/last sample only when set; F is
  // then taken as 0 there.
  bool stationary_endpoints = false;
};

/// Composite trapezoid of F along the trajectory samples.
double randers_length(const ZermeloData& z, const Trajectory& traj, const LengthOptions& options = {});

struct ThrottleReport {
  double max_deviation = 0.0;  // max | |v − W(x)|_h − 1 |
  std::size_t worst_sample = 0;
  double tolerance = 0.0;
  bool pass = false;
};

ThrottleReport verify_full_throttle(const ZermeloData& z, const Trajectory& traj, double tol);

}  // namespace zermelo
