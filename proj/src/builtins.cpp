#include "zermelo/builtins.hpp"

#include <cmath>
#include <numeric>

#include "zermelo/errors.hpp"

namespace zermelo::builtin {

namespace {

void require_dimension(int n, const char* what) {
  if (n < 1) throw Error(ErrorCode::invalid_input, std::string(what) + ": dimension must be >= 1");
}

}  // namespace

MetricField euclidean(int n) {
  require_dimension(n, "euclidean");
  return {n, [n](const ChartPoint&) -> Matrix { return Matrix::Identity(n, n); }};
}

MetricField polar() {
  return {2, [](const ChartPoint& x) -> Matrix {
            if (!(x[0] > 0.0)) {
              throw Error(ErrorCode::domain_exit, "polar chart requires r > 0");
            }
            Matrix h = Matrix::Zero(2, 2);
            h(0, 0) = 1.0;
            h(1, 1) = x[0] * x[0];
            return h;
          }};
}

MetricField conformal(double lambda, int n) {
  require_dimension(n, "conformal");
  return {n, [lambda, n](const ChartPoint& x) -> Matrix {
            return std::exp(2.0 * lambda * x[0]) * Matrix::Identity(n, n);
          }};
}

WindField constant(const Vector& w) {
  const int n = static_cast<int>(w.size());
  require_dimension(n, "constant wind");
  return {n, [w](const ChartPoint&) -> Vector { return w; }, std::nullopt};
}

WindField rotation(double omega) {
  return {2, [omega](const ChartPoint& x) -> Vector {
            return Eigen::Vector2d(-omega * x[1], omega * x[0]);
          }, std::nullopt};
}

WindField dilation(double c, int n) {
  require_dimension(n, "dilation wind");
  return {n, [c](const ChartPoint& x) -> Vector { return c * x; }, std::nullopt};
}

WindField combo(double c, double omega, const Vector& w) {
  if (w.size() != 2) throw Error(ErrorCode::dimension_mismatch, "combo wind is planar");
  return {2, [c, omega, w](const ChartPoint& x) -> Vector {
            return Vector(c * x + Eigen::Vector2d(-omega * x[1], omega * x[0]) + w);
          }, std::nullopt};
}

WindField polynomial(int n, std::vector<PolynomialTerm> terms) {
  require_dimension(n, "polynomial wind");
  for (const PolynomialTerm& term : terms) {
    if (term.component < 0 || term.component >= n) {
      throw Error(ErrorCode::dimension_mismatch, "polynomial term component out of range");
    }
    if (static_cast<int>(term.exponents.size()) != n) {
      throw Error(ErrorCode::dimension_mismatch, "polynomial term needs one exponent per coordinate");
    }
    for (int e : term.exponents) {
      if (e < 0) throw Error(ErrorCode::invalid_input, "negative polynomial exponent");
    }
    if (std::accumulate(term.exponents.begin(), term.exponents.end(), 0) > max_polynomial_degree) {
      throw Error(ErrorCode::invalid_input, "polynomial term exceeds the maximum degree");
    }
  }
  return {n, [n, terms = std::move(terms)](const ChartPoint& x) -> Vector {
            Vector w = Vector::Zero(n);
            for (const PolynomialTerm& term : terms) {
              double monomial = term.coefficient;
              for (int i = 0; i < n; ++i) {
                for (int p = 0; p < term.exponents[i]; ++p) monomial *= x[i];
              }
              w[term.component] += monomial;
            }
            return w;
          }, std::nullopt};
}

}  // namespace zermelo::builtin
