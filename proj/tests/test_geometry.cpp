#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "builtin_cases.hpp"
#include "zermelo/builtins.hpp"
#include "zermelo/geometry.hpp"

using namespace zermelo;
using zermelo::testing::homothetic_cases;
using zermelo::testing::vec;

namespace {

// Γ^k_ij for diag(1, r²): Γ^r_θθ = −r, Γ^θ_rθ = Γ^θ_θr = 1/r.
double polar_symbol(int k, int i, int j, double r) {
  if (k == 0 && i == 1 && j == 1) return -r;
  if (k == 1 && i + j == 1) return 1.0 / r;
  return 0.0;
}

// Γ^k_ij for e^{2λx₁}·I: λ(δ_ki δ_j1 + δ_kj δ_i1 − δ_ij δ_k1).
double conformal_symbol(int k, int i, int j, double lambda) {
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return lambda * (d(k, i) * d(j, 0) + d(k, j) * d(i, 0) - d(i, j) * d(k, 0));
}

}  // namespace

TEST(Christoffel, EuclideanVanishes) {
  const Christoffel G = christoffel_symbols(builtin::euclidean(3), vec({0.4, -1.0, 2.0}));
  for (const Matrix& block : G.blocks) EXPECT_EQ(block.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Christoffel, PolarAtRadiusTwo) {
  const Christoffel G = christoffel_symbols(builtin::polar(), vec({2.0, 0.7}));
  EXPECT_NEAR(G(0, 1, 1), -2.0, 1e-8);
  EXPECT_NEAR(G(1, 0, 1), 0.5, 1e-8);
  EXPECT_NEAR(G(1, 1, 0), 0.5, 1e-8);
  EXPECT_NEAR(G(0, 0, 0), 0.0, 1e-8);
  EXPECT_NEAR(G(0, 0, 1), 0.0, 1e-8);
  EXPECT_NEAR(G(1, 0, 0), 0.0, 1e-8);
  EXPECT_NEAR(G(1, 1, 1), 0.0, 1e-8);
}

TEST(Christoffel, ConformalAtOrigin) {
  const Christoffel G = christoffel_symbols(builtin::conformal(1.0), vec({0.0, 0.0}));
  EXPECT_NEAR(G(0, 0, 0), 1.0, 1e-8);
  EXPECT_NEAR(G(0, 1, 1), -1.0, 1e-8);
  EXPECT_NEAR(G(1, 0, 1), 1.0, 1e-8);
  EXPECT_NEAR(G(1, 1, 0), 1.0, 1e-8);
  EXPECT_NEAR(G(0, 0, 1), 0.0, 1e-8);
  EXPECT_NEAR(G(1, 0, 0), 0.0, 1e-8);
  EXPECT_NEAR(G(1, 1, 1), 0.0, 1e-8);
}

TEST(Christoffel, MatchesClosedFormsAtRandomPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(0.3, 3.0), a(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double radius = r(rng);
    const Christoffel P = christoffel_symbols(builtin::polar(), vec({radius, a(rng)}));
    const double lambda = 0.5 * a(rng);
    const Christoffel C = christoffel_symbols(builtin::conformal(lambda, 3), vec({a(rng), a(rng), a(rng)}));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(P(k, i, j), polar_symbol(k, i, j, radius), 1e-6);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(C(k, i, j), conformal_symbol(k, i, j, lambda), 1e-6);
  }
}

TEST(Christoffel, ExactlySymmetricInLowerIndices) {
  std::mt19937_64 rng(12);
  for (const auto& c : homothetic_cases()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Christoffel G = christoffel_symbols(c.z.h, c.sample(rng));
      for (const Matrix& block : G.blocks) EXPECT_TRUE(block == block.transpose()) << c.name;
    }
  }
}

TEST(Christoffel, SingularMetricIsRejected) {
  const MetricField degenerate{2, [](const ChartPoint&) { return Matrix(Matrix::Zero(2, 2)); }};
  try {
    christoffel_symbols(degenerate, vec({0.0, 0.0}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_invertible);
  }
}

TEST(MetricEvaluation, RejectsAsymmetricMatrix) {
  const MetricField skew{2, [](const ChartPoint&) {
                           Matrix m(2, 2);
                           m << 1.0, 0.1, 0.0, 1.0;
                           return m;
                         }};
  try {
    evaluate_metric(skew, vec({0.0, 0.0}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_input);
  }
}

TEST(Geodesic, EuclideanStraightLine) {
  const Trajectory g = integrate_geodesic(builtin::euclidean(2), vec({0, 0}), vec({1, 0}), 1.0);
  EXPECT_EQ(g.tag, Parameterization::affine);
  EXPECT_NEAR(g.front().t, 0.0, 0.0);
  EXPECT_NEAR(g.back().t, 1.0, 1e-12);
  EXPECT_NEAR((g.back().x - vec({1, 0})).norm(), 0.0, 1e-12);
}

TEST(Geodesic, EuclideanSpeedConserved) {
  const MetricField h = builtin::euclidean(3);
  const Trajectory g = integrate_geodesic(h, vec({1, 2, 3}), vec({-0.3, 0.7, 2.0}), 2.5);
  EXPECT_NEAR(h_norm(h, g.back().x, g.back().v), h_norm(h, g.front().x, g.front().v), 1e-8);
}

TEST(Geodesic, PolarRadialLine) {
  const Trajectory g = integrate_geodesic(builtin::polar(), vec({1, 0}), vec({1, 0}), 1.5);
  for (const Sample& s : g.samples) {
    EXPECT_NEAR(s.x[0], 1.0 + s.t, 1e-9);
    EXPECT_NEAR(s.x[1], 0.0, 1e-12);
  }
}

TEST(Geodesic, SpeedConservedOnCurvedCharts) {
  const std::vector<std::pair<MetricField, Vector>> cases{
      {builtin::conformal(0.3), vec({0.2, -0.1})},
      {builtin::polar(), vec({1.0, 0.3})},
  };
  for (const auto& [h, x0] : cases) {
    const Vector v0 = vec({0.3, 0.4});
    const Trajectory g = integrate_geodesic(h, x0, v0, 10.0);
    const double s0 = h_norm(h, x0, v0);
    double worst = 0.0;
    for (const Sample& s : g.samples) worst = std::max(worst, std::abs(h_norm(h, s.x, s.v) - s0));
    EXPECT_LE(worst, 1e-6 * s0);
  }
}

TEST(Geodesic, LeavingTheChartIsReported) {
  try {
    integrate_geodesic(builtin::polar(), vec({1, 0}), vec({-1, 0}), 2.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain_exit);
  }
}

TEST(Flow, ConstantWindTranslates) {
  const ChartPoint x = flow_map(builtin::constant(vec({0.5, 0})), vec({0, 0}), 2.0, FlowDirection::backward);
  EXPECT_NEAR((x - vec({-1, 0})).norm(), 0.0, 1e-12);
}

TEST(Flow, DilationContracts) {
  const ChartPoint x = flow_map(builtin::dilation(0.1), vec({1, 0}), 1.0, FlowDirection::backward);
  EXPECT_NEAR(x[0], std::exp(-0.1), 1e-12);
  EXPECT_NEAR(x[1], 0.0, 1e-15);
}

TEST(Flow, RotationTurnsRigidly) {
  const ChartPoint x = flow_map(builtin::rotation(0.3), vec({1, 0}), 1.0, FlowDirection::backward);
  EXPECT_NEAR(x[0], std::cos(0.3), 1e-12);
  EXPECT_NEAR(x[1], -std::sin(0.3), 1e-12);
}

TEST(Flow, GroupLaw) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (const auto& c : homothetic_cases()) {
    for (FlowDirection d : {FlowDirection::forward, FlowDirection::backward}) {
      const ChartPoint x = c.sample(rng);
      const double s = t(rng), u = t(rng);
      const ChartPoint two_step = flow_map(c.z.W, flow_map(c.z.W, x, s, d), u, d);
      const ChartPoint one_step = flow_map(c.z.W, x, s + u, d);
      EXPECT_LE((two_step - one_step).norm(), 1e-7) << c.name;
    }
  }
}

TEST(FlowDifferential, ConstantWindLeavesVectorsAlone) {
  const Vector v = vec({0.3, -2.0});
  const Vector pushed =
      flow_differential(builtin::constant(vec({0.2, 0.1})), vec({1, 1}), 1.3, v, FlowDirection::backward);
  EXPECT_NEAR((pushed - v).norm(), 0.0, 1e-14);
}

TEST(FlowDifferential, DilationScalesByExponential) {
  const Vector pushed =
      flow_differential(builtin::dilation(0.1), vec({1, 0}), 1.0, vec({1, 0}), FlowDirection::backward);
  EXPECT_NEAR(pushed[0], std::exp(-0.1), 1e-12);
  EXPECT_NEAR(pushed[1], 0.0, 1e-15);
  EXPECT_NEAR(pushed.squaredNorm(), std::exp(-0.2), 1e-12);
}

TEST(FlowDifferential, RotationPushesItsOwnField) {
  const WindField W = builtin::rotation(0.3);
  const ChartPoint x = vec({0.4, -0.9});
  const ChartPoint y = flow_map(W, x, 0.7, FlowDirection::forward);
  const Vector pushed = flow_differential(W, y, 0.7, evaluate_wind(W, y), FlowDirection::backward);
  EXPECT_LE((pushed - evaluate_wind(W, x)).norm(), 1e-8);
}

// Dφ_t(W(φ_t⁻¹(x))) = W(x), with φ the flow of −W.
TEST(FlowDifferential, WindPushforwardIdentity) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> t(0.0, 2.0);
  for (const auto& c : homothetic_cases()) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint x = c.sample(rng);
      const double s = t(rng);
      const ChartPoint y = flow_map(c.z.W, x, s, FlowDirection::forward);
      const FlowResult back = flow_with_differential(c.z.W, y, s, evaluate_wind(c.z.W, y), FlowDirection::backward);
      worst = std::max(worst, (back.pushed - evaluate_wind(c.z.W, x)).norm());
    }
    EXPECT_LE(worst, 1e-6) << c.name;
  }
}

TEST(FlowDifferential, HomothetyScalingLaw) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> t(0.0, 2.0), comp(-1.0, 1.0);
  for (const auto& c : homothetic_cases()) {
    for (int trial = 0; trial < 10; ++trial) {
      const ChartPoint x = c.sample(rng);
      Vector v(x.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = comp(rng);
      const double s = t(rng);
      const FlowResult r = flow_with_differential(c.z.W, x, s, v, FlowDirection::backward);
      const double ratio = std::pow(h_norm(c.z.h, r.point, r.pushed), 2) / std::pow(h_norm(c.z.h, x, v), 2);
      EXPECT_NEAR(ratio * std::exp(c.sigma * s), 1.0, 1e-6) << c.name;
    }
  }
}

TEST(LieDerivative, Examples) {
  const MetricField h = builtin::euclidean(2);
  const ChartPoint x = vec({0.7, -0.4});
  EXPECT_LE(lie_derivative_metric(h, builtin::constant(vec({0.2, 0.3})), x).norm(), 1e-10);
  EXPECT_LE((lie_derivative_metric(h, builtin::dilation(0.1), x) - 0.2 * Matrix::Identity(2, 2)).norm(), 1e-9);
  EXPECT_LE(lie_derivative_metric(h, builtin::rotation(0.4), x).norm(), 1e-9);
}

TEST(HomothetySigma, RecoversBuiltinConstants) {
  std::mt19937_64 rng(16);
  for (const auto& c : homothetic_cases()) {
    std::vector<ChartPoint> points;
    for (int i = 0; i < 20; ++i) points.push_back(c.sample(rng));
    const HomothetyEstimate est = homothety_sigma(c.z.h, c.z.W, points);
    EXPECT_NEAR(est.sigma, c.sigma, 1e-6) << c.name;
  }
}

TEST(HomothetySigma, RotationPlusConstantIsKilling) {
  const WindField W = builtin::combo(0.0, 0.25, vec({0.1, -0.2}));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ChartPoint> points;
  for (int i = 0; i < 20; ++i) points.push_back(vec({u(rng), u(rng)}));
  EXPECT_NEAR(homothety_sigma(builtin::euclidean(2), W, points).sigma, 0.0, 1e-6);
}

TEST(HomothetySigma, QuadraticWindIsRejected) {
  const WindField W = builtin::polynomial(2, {{0, 1.0, {2, 0}}});
  const std::vector<ChartPoint> points{vec({0.1, 0.0}), vec({0.5, 0.3}), vec({-0.4, 0.2})};
  try {
    homothety_sigma(builtin::euclidean(2), W, points);
    FAIL() << "expected NotHomothety";
  } catch (const NotHomothety& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_homothety);
    EXPECT_GT(e.worst_residual(), 1e-6);
  }
}

TEST(HNorm, Examples) {
  EXPECT_DOUBLE_EQ(h_norm(builtin::euclidean(2), vec({0, 0}), vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(h_norm(builtin::polar(), TangentVector{vec({2, 0}), vec({0, 0})}), 0.0);
  const MetricField diag{2, [](const ChartPoint&) { return Matrix(Eigen::Vector2d(1, 4).asDiagonal()); }};
  EXPECT_DOUBLE_EQ(h_norm(diag, vec({0, 0}), vec({1, 1})), std::sqrt(5.0));
}

TEST(Frame, OrthonormalAndUpperTriangular) {
  Matrix h(3, 3);
  h << 2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 0.8;
  const Matrix E = orthonormal_frame(h);
  EXPECT_LE((E.transpose() * h * E - Matrix::Identity(3, 3)).norm(), 1e-13);
  EXPECT_EQ(E(1, 0), 0.0);
  EXPECT_EQ(E(2, 0), 0.0);
  EXPECT_EQ(E(2, 1), 0.0);
  EXPECT_GT(E(0, 0), 0.0);
}

TEST(Frame, AnglesRoundTrip) {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = g(rng);
      u.normalize();
      const std::vector<double> angles = angles_from_unit(u);
      ASSERT_EQ(static_cast<int>(angles.size()), n - 1);
      EXPECT_LE((unit_from_angles(angles, n) - u).norm(), 1e-12);
    }
  }
}
