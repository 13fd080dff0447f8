#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace zermelo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Chart coordinates of a point; tangent vectors share the same coordinate basis.
using ChartPoint = Vector;

struct TangentVector {
  ChartPoint base;
  Vector components;
};

// Riemannian metric h_ij(x) in a single chart.
struct MetricField {
  int dimension = 0;
  std::function<Matrix(const ChartPoint&)> evaluator;

  Matrix operator()(const ChartPoint& x) const;
};

// Drift vector field W(x). `declared_sigma` is the homothety constant when known.
struct WindField {
  int dimension = 0;
  std::function<Vector(const ChartPoint&)> evaluator;
  std::optional<double> declared_sigma;

  Vector operator()(const ChartPoint& x) const;
};

enum class Parameterization { physical, affine, arclength };

struct Sample {
  double t = 0.0;
  ChartPoint x;
  Vector v;
};

struct Trajectory {
  std::vector<Sample> samples;
  Parameterization tag = Parameterization::affine;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }
  double duration() const { return samples.back().t - samples.front().t; }
  int dimension() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }
};

const char* to_string(Parameterization tag);

// Checks strictly increasing times and consistent dimensions. Throws InvalidInput.
void validate(const Trajectory& traj);

// Fixed-step integration settings shared by every RK4 loop in the library.
struct IntegratorSettings {
  double dt = 1e-3;
};

// Central difference step for metric and wind partial derivatives.
inline double fd_step(const ChartPoint& x) {
  return 1e-5 * std::max(1.0, x.norm());
}

}  // namespace zermelo
