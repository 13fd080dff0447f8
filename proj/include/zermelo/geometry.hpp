#pragma once

#include <span>
#include <vector>

#include "zermelo/errors.hpp"
#include "zermelo/types.hpp"

namespace zermelo {

// Levi-Civita symbols Γ^k_ij, stored as one symmetric n×n block per upper index k.
struct Christoffel {
  std::vector<Matrix> blocks;

  double operator()(int k, int i, int j) const { return blocks[k](i, j); }
  int dimension() const { return static_cast<int>(blocks.size()); }

  // Γ^k_ij a^i b^j
  Vector contract(const Vector& a, const Vector& b) const;
};

/// Evaluates h at x and checks that the result is finite, symmetric and
/// positive-definite. Failures raise `domain_exit`.
Matrix evaluate_metric(const MetricField& h, const ChartPoint& x);

/// Evaluates W at x; non-finite output raises `domain_exit`.
Vector evaluate_wind(const WindField& W, const ChartPoint& x);

/// ∂_l h_ij by central differences, one matrix per direction l.
std::vector<Matrix> metric_partials(const MetricField& h, const ChartPoint& x);

/// Jacobian J(a, b) = ∂_b W^a by central differences.
Matrix wind_jacobian(const WindField& W, const ChartPoint& x);

/// Γ^k_ij = ½ h^{kl}(∂_i h_jl + ∂_j h_il − ∂_l h_ij). Throws `non_invertible`
/// when h(x) is singular.
Christoffel christoffel_symbols(const MetricField& h, const ChartPoint& x);

/// RK4 integration of the geodesic equation on [0, T]. Output is affine
/// parameterized and includes both endpoints.
Trajectory integrate_geodesic(const MetricField& h, const ChartPoint& x0,
                              const Vector& v0, double T, double dt = 1e-3);

enum class FlowDirection : int { forward = 1, backward = -1 };

// ẋ = direction·W(x). `backward` is the flow of −W.
ChartPoint flow_map(const WindField& W, const ChartPoint& x0, double t,
                    FlowDirection direction, double dt = 1e-3);

struct FlowResult {
  ChartPoint point;
  Vector pushed;
};

/// Pushforward Dφ_t(v) of the flow, obtained from the variational equation
/// δẋ = direction·∂W(x(t))·δx integrated alongside the flow.
FlowResult flow_with_differential(const WindField& W, const ChartPoint& x0, double t,
                                  const Vector& v, FlowDirection direction,
                                  double dt = 1e-3);

Vector flow_differential(const WindField& W, const ChartPoint& x0, double t,
                         const Vector& v, FlowDirection direction, double dt = 1e-3);

/// (L_W h)_ij = W^k ∂_k h_ij + h_kj ∂_i W^k + h_ik ∂_j W^k
Matrix lie_derivative_metric(const MetricField& h, const WindField& W, const ChartPoint& x);

struct HomothetyEstimate {
  double sigma = 0.0;
  double worst_residual = 0.0;  // max ‖L_W h − c h‖_F / ‖h‖_F
  double spread = 0.0;          // max c − min c
  ChartPoint worst_point;
};

/// Least-squares homothety constant c(x) = ⟨L_W h, h⟩_F / ⟨h, h⟩_F at every
/// sample. Throws NotHomothety unless every residual and the spread of c are
/// within `tol`.
HomothetyEstimate homothety_sigma(const MetricField& h, const WindField& W,
                                  std::span<const ChartPoint> sample_points,
                                  double tol = 1e-6);

double h_norm(const MetricField& h, const TangentVector& v);
double h_norm(const MetricField& h, const ChartPoint& x, const Vector& v);

// h-orthonormal frame at x: columns e_a with h(e_a, e_b) = δ_ab, obtained by
// Gram–Schmidt on the coordinate frame.
Matrix orthonormal_frame(const Matrix& h_at_x);

// Unit vector in R^n from n−1 hyperspherical angles; the last angle spans the
// full circle. n == 1 has no angles and yields +1.
Vector unit_from_angles(std::span<const double> angles, int n);
std::vector<double> angles_from_unit(const Vector& u);

}  // namespace zermelo
