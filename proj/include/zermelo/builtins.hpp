#pragma once

#include <vector>

#include "zermelo/types.hpp"

namespace zermelo::builtin {

MetricField euclidean(int n);

// Plane in polar coordinates (r, θ): diag(1, r²). Valid for r > 0.
MetricField polar();

// e^{2λ x₁}·I in n dimensions.
MetricField conformal(double lambda, int n = 2);

WindField constant(const Vector& w);

// ω·(−x₂, x₁) in the plane.
WindField rotation(double omega);

// c·x in n dimensions.
WindField dilation(double c, int n = 2);

// c·x + ω·(−x₂, x₁) + w in the plane.
WindField combo(double c, double omega, const Vector& w);

struct PolynomialTerm {
  int component = 0;  // zero-based output component
  double coefficient = 0.0;
  std::vector<int> exponents;
};

inline constexpr int max_polynomial_degree = 6;

// W^component += coefficient · Π x_i^{exponents_i}
WindField polynomial(int n, std::vector<PolynomialTerm> terms);

}  // namespace zermelo::builtin
