#pragma once

// Bracketed root finding for continuous scalar functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ranksel/errors.hpp"

namespace ranksel {

struct RootTolerances {
  double x_abs = 1e-12;
  double x_rel = 4 * std::numeric_limits<double>::epsilon();
  double f_abs = 0.0;  // stop early once |f| <= f_abs
  int max_iterations = 200;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Brent's method on [a, b] given f(a), f(b) of opposite sign (or zero).
/// Combines inverse quadratic interpolation, secant steps and bisection; the
/// bracket never loses the sign change.
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      const RootTolerances& tol = {}) {
  RootResult out;
  if (fa == 0.0) return {a, fa, a, a, 0, true};
  if (fb == 0.0) return {b, fb, b, b, 0, true};
  if ((fa > 0) == (fb > 0)) {
    throw SolverError("brent_root: endpoints do not bracket a root");
  }

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 1; it <= tol.max_iterations; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * tol.x_rel * std::fabs(b) + 0.5 * tol.x_abs;
    const double xm = 0.5 * (c - b);
    out.iterations = it;
    if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= tol.f_abs) {
      out.converged = true;
      break;
    }
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  out.x = b;
  out.fx = fb;
  out.lo = std::min(b, c);
  out.hi = std::max(b, c);
  return out;
}

struct Bracket {
  double lo, hi, f_lo, f_hi;
  int expansions;
};

/// Find a sign change of an increasing function, starting from [lo, hi] and
/// doubling the width on whichever side still lacks the sign change.
template <class F>
Bracket bracket_increasing(F&& f, double lo, double hi, int max_expansions = 80) {
  double flo = f(lo), fhi = f(hi);
  int n = 0;
  while (fhi < 0 && n < max_expansions) {
    const double width = hi - lo;
    lo = hi;
    flo = fhi;
    hi += 2.0 * width;
    fhi = f(hi);
    ++n;
  }
  while (flo > 0 && n < max_expansions) {
    const double width = hi - lo;
    hi = lo;
    fhi = flo;
    lo -= 2.0 * width;
    flo = f(lo);
    ++n;
  }
  if (!(flo <= 0 && fhi >= 0)) {
    throw SolverError("bracket_increasing: no sign change after expansion limit");
  }
  return {lo, hi, flo, fhi, n};
}

}  // namespace ranksel
