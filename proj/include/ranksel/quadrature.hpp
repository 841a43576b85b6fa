#pragma once

/// Composite Gauss–Legendre quadrature with panel doubling.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ranksel/errors.hpp"

namespace ranksel {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point rule; nodes by Newton iteration on the Legendre recurrence.
inline GaussLegendreRule make_gauss_legendre(int n) {
  detail::require(n >= 1, "make_gauss_legendre: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-16) break;
    }
    // one more derivative evaluation at the converged node
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

inline const GaussLegendreRule& gauss_legendre_16() {
  static const GaussLegendreRule rule = make_gauss_legendre(16);
  return rule;
}

/// Sum of the rule over `panels` equal sub-intervals of [a, b].
template <class F>
double composite_gauss_legendre(F&& f, double a, double b, int panels,
                                const GaussLegendreRule& rule = gauss_legendre_16()) {
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += panel * half;
  }
  return total;
}

struct QuadratureOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  int initial_panels = 8;
  int max_panels = 4096;
};

struct QuadratureResult {
  double value = 0.0;
  double change = 0.0;  // |I(2n) - I(n)| at the last refinement
  int panels = 0;
  long nodes = 0;       // total integrand evaluations
  bool converged = false;
};

/// Doubles the panel count until two successive composite sums agree to
/// max(rel_tol * |I|, abs_tol).
template <class F>
QuadratureResult integrate_panels(F&& f, double a, double b,
                                  const QuadratureOptions& opt = {}) {
  const auto& rule = gauss_legendre_16();
  const long per_panel = static_cast<long>(rule.nodes.size());
  QuadratureResult r;
  int panels = opt.initial_panels;
  double prev = composite_gauss_legendre(f, a, b, panels, rule);
  r.nodes = panels * per_panel;
  while (panels < opt.max_panels) {
    panels *= 2;
    const double next = composite_gauss_legendre(f, a, b, panels, rule);
    r.nodes += panels * per_panel;
    r.change = std::fabs(next - prev);
    prev = next;
    if (r.change <= std::max(opt.rel_tol * std::fabs(next), opt.abs_tol)) {
      r.converged = true;
      break;
    }
  }
  r.value = prev;
  r.panels = panels;
  return r;
}

}  // namespace ranksel
