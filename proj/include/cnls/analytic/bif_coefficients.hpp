#pragma once

// Pitchfork coefficients a2 and b2 at beta1 = beta1^(l), in the omega = 1
// normalization (pass s_norm = s / omega). Table values for (omega, s) = (1, 4)
// correspond to s_norm = 4.

#include <cmath>
#include <string>
#include <vector>

#include "cnls/analytic/formulas.hpp"
#include "cnls/errors.hpp"
#include "cnls/quadrature.hpp"

namespace cnls::analytic {

struct BifCoefficients {
  double a_bar2 = 0.0;
  double b_bar2 = 0.0;
  int ell = 0;
};

struct BifQuadratureSettings {
  double relative_tolerance = 1e-12;
  double tail_threshold = 1e-14;
  int initial_panels = 32;
  int max_refinements = 6;
  int gauss_points = 8;
  double grading = 1.04;  // ratio of consecutive panel widths
};

namespace detail {

inline double phi11(double x) {
  const double c = std::cosh(x);
  return 0.5 / c * (3.0 - c * c - 3.0 * x * std::tanh(x));
}

inline double phi12(double x) { return std::tanh(x) / std::cosh(x); }

// Panel boundaries on [0, X], widths growing geometrically away from 0.
inline std::vector<double> graded_panels(double x_max, int panels, double ratio) {
  std::vector<double> edges(panels + 1, 0.0);
  double total = 0.0, w = 1.0;
  std::vector<double> widths(panels);
  for (int k = 0; k < panels; ++k) {
    widths[k] = w;
    total += w;
    w *= ratio;
  }
  for (int k = 0; k < panels; ++k) edges[k + 1] = edges[k] + widths[k] * x_max / total;
  edges[panels] = x_max;
  return edges;
}

struct HalfLineIntegrals {
  double a2_half = 0.0;       // int_0^X V^2 sech^2
  double nested_half = 0.0;   // int_0^X phi11 V^2 sech (int_x^inf phi12 V^2 sech)
  double quartic_half = 0.0;  // int_0^X V^4
};

inline HalfLineIntegrals half_line_integrals(double s_norm, int ell, double x_max, int panels,
                                             const BifQuadratureSettings& cfg) {
  const auto rule = gauss_legendre(cfg.gauss_points);
  const auto edges = graded_panels(x_max, panels, cfg.grading);
  auto v = [&](double x) { return kernel_mode_V1(x, 1.0, s_norm, ell); };
  auto inner_integrand = [&](double y) {
    const double vy = v(y);
    return phi12(y) * vy * vy / std::cosh(y);
  };

  // tail[k] = int_{edges[k]}^{X} inner integrand, accumulated right to left
  std::vector<double> tail(panels + 1, 0.0);
  for (int k = panels - 1; k >= 0; --k) {
    const double a = edges[k], h = edges[k + 1] - a;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      acc += rule.weights[q] * inner_integrand(a + h * rule.nodes[q]);
    tail[k] = tail[k + 1] + h * acc;
  }

  HalfLineIntegrals out;
  for (int k = 0; k < panels; ++k) {
    const double a = edges[k], b = edges[k + 1], h = b - a;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = a + h * rule.nodes[q];
      const double w = h * rule.weights[q];
      const double vx = v(x);
      const double sh = 1.0 / std::cosh(x);
      // partial panel [x, b] for the inner integral
      double partial = 0.0;
      for (std::size_t r = 0; r < rule.nodes.size(); ++r)
        partial += rule.weights[r] * inner_integrand(x + (b - x) * rule.nodes[r]);
      const double inner = tail[k + 1] + (b - x) * partial;
      out.a2_half += w * vx * vx * sh * sh;
      out.nested_half += w * phi11(x) * vx * vx * sh * inner;
      out.quartic_half += w * vx * vx * vx * vx;
    }
  }
  return out;
}

// Smallest X (on a 0.5 grid) beyond which all integrands are below threshold.
inline double tail_cutoff(double s_norm, int ell, double threshold) {
  for (double x = 2.0; x < 400.0; x += 0.5) {
    const double vx = kernel_mode_V1(x, 1.0, s_norm, ell);
    const double sh = 1.0 / std::cosh(x);
    const double v2 = vx * vx;
    const double m = std::max({v2 * sh * sh, v2 * v2, std::abs(phi11(x)) * v2 * sh * v2});
    if (m < threshold) return x;
  }
  throw QuadratureError("bif_coefficients: integrands do not decay below the tail threshold");
}

}  // namespace detail

inline BifCoefficients bif_coefficients(double s_norm, double beta2, int ell,
                                        const BifQuadratureSettings& cfg = {}) {
  if (!(s_norm > 0.0)) throw DomainError("bif_coefficients: s_norm must be positive");
  if (ell < 0) throw DomainError("bif_coefficients: ell must be >= 0");
  const double beta1 = critical_coupling(1.0, s_norm, ell);
  const double x_max = detail::tail_cutoff(s_norm, ell, cfg.tail_threshold);

  auto evaluate = [&](int panels) {
    const auto h = detail::half_line_integrals(s_norm, ell, x_max, panels, cfg);
    // all integrands are even in x
    BifCoefficients c;
    c.ell = ell;
    c.a_bar2 = -2.0 * (2.0 * h.a2_half);
    c.b_bar2 = 8.0 * beta1 * beta1 * (2.0 * h.nested_half) - beta2 * (2.0 * h.quartic_half);
    return c;
  };

  int panels = cfg.initial_panels;
  BifCoefficients coarse = evaluate(panels);
  for (int level = 0; level < cfg.max_refinements; ++level) {
    panels *= 2;
    BifCoefficients fine = evaluate(panels);
    const double da = std::abs(fine.a_bar2 - coarse.a_bar2);
    const double db = std::abs(fine.b_bar2 - coarse.b_bar2);
    const double scale_a = std::max(1.0, std::abs(fine.a_bar2));
    const double scale_b = std::max(1.0, std::abs(fine.b_bar2));
    if (da <= cfg.relative_tolerance * scale_a && db <= cfg.relative_tolerance * scale_b)
      return fine;
    coarse = fine;
  }
  throw QuadratureError("bif_coefficients: refinements did not converge for ell = " +
                        std::to_string(ell));
}

}  // namespace cnls::analytic
