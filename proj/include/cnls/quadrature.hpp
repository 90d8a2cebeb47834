#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace cnls {

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

/// n-point Gauss-Legendre rule mapped to [0, 1], nodes ascending.
inline QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = detail::legendre_with_derivative(n, x);
    (void)p;
    // reversed so that nodes ascend
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

/// The m + 1 Gauss-Lobatto points on [0, 1] (endpoints included, ascending).
inline std::vector<double> gauss_lobatto_points(int m) {
  std::vector<double> t(m + 1);
  t[0] = 0.0;
  t[m] = 1.0;
  for (int j = 1; j < m; ++j) {
    // interior points are the roots of P_m'
    double x = -std::cos(std::numbers::pi * j / m);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(m, x);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    t[j] = 0.5 * (1.0 + x);
  }
  return t;
}

}  // namespace cnls
