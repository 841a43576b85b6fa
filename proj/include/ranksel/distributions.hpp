#pragma once

/// Student-t, normal and chi-square distribution functions and samplers.
///
/// The t distribution functions go through the regularized incomplete beta
/// function, evaluated by continued fraction.  Upper tails are computed
/// directly (never as 1 - cdf) so that tail probabilities far below machine
/// epsilon keep full relative precision; the selection-constant integrals
/// rely on this.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ranksel/errors.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/roots.hpp"

namespace ranksel {

/// Degrees of freedom of a Student-t law (nu = N0 - 1).
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(int value) : value_(value) {
    detail::require(value >= 1, "degrees of freedom must be >= 1, got " + std::to_string(value));
  }
  [[nodiscard]] int value() const { return value_; }
  [[nodiscard]] double as_double() const { return static_cast<double>(value_); }
  friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

 private:
  int value_;
};

/// Confidence level, strictly inside (0, 1).
class Probability {
 public:
  explicit Probability(double value) : value_(value) {
    detail::require(value > 0.0 && value < 1.0,
                    "probability must lie in (0, 1), got " + std::to_string(value));
  }
  [[nodiscard]] double value() const { return value_; }
  friend bool operator==(Probability, Probability) = default;

 private:
  double value_;
};

namespace detail {

inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

/// I_x(a, b) with x and 1 - x supplied separately (together with their logs)
/// so that callers can pass whichever of the pair they know accurately.
/// `log_inv_beta` is log(1 / B(a, b)).
inline double regularized_beta(double a, double b, double x, double xc, double log_x,
                               double log_xc, double log_inv_beta) {
  if (x <= 0.0) return 0.0;
  if (xc <= 0.0) return 1.0;
  const double log_front = log_inv_beta + a * log_x + b * log_xc;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, xc) / b;
}

/// log(Gamma(a + 1/2) / Gamma(a)); asymptotic series for large a where the
/// lgamma difference would cancel.
inline double log_gamma_half_ratio(double a) {
  if (a < 15.0) return std::lgamma(a + 0.5) - std::lgamma(a);
  const double r = 1.0 / a;
  const double r2 = r * r;
  return 0.5 * std::log(a) +
         r * (-1.0 / 8 + r2 * (1.0 / 192 + r2 * (-1.0 / 640 + r2 * (17.0 / 14336 - r2 * 31.0 / 18432))));
}

}  // namespace detail

/// Standard normal cdf.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal quantile: Acklam's rational approximation polished with
/// one Halley step against erfc.
inline double normal_quantile(double q) {
  detail::require(q > 0.0 && q < 1.0, "normal_quantile: q must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (q < kLow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (q <= 1.0 - kLow) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double r = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }
  const double e = normal_cdf(x) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

/// Student-t law with integer degrees of freedom; caches the density's
/// normalising constant.
class StudentT {
 public:
  explicit StudentT(DegreesOfFreedom nu)
      : nu_(nu.as_double()),
        log_norm_(detail::log_gamma_half_ratio(0.5 * nu_) - 0.5 * std::log(nu_ * std::numbers::pi)),
        beta_norm_(detail::log_gamma_half_ratio(0.5 * nu_) - 0.5 * std::log(std::numbers::pi)) {}

  [[nodiscard]] double nu() const { return nu_; }

  [[nodiscard]] double pdf(double x) const {
    return std::exp(log_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / nu_));
  }

  /// P(T > x).
  [[nodiscard]] double sf(double x) const {
    if (x == 0.0) return 0.5;
    const double tail = half_tail(std::fabs(x));
    return x > 0.0 ? tail : 1.0 - tail;
  }

  /// P(T <= x).
  [[nodiscard]] double cdf(double x) const {
    if (x == 0.0) return 0.5;
    const double tail = half_tail(std::fabs(x));
    return x < 0.0 ? tail : 1.0 - tail;
  }

  /// log P(T <= x), accurate in both tails.
  [[nodiscard]] double log_cdf(double x) const {
    if (x == 0.0) return -std::numbers::ln2;
    const double tail = half_tail(std::fabs(x));
    return x < 0.0 ? std::log(tail) : std::log1p(-tail);
  }

  /// Inverse cdf: solves P(T > x) = min(q, 1 - q) on x >= 0 and reflects.
  [[nodiscard]] double quantile(double q) const {
    detail::require(q > 0.0 && q < 1.0, "t_quantile: q must lie in (0, 1)");
    if (q == 0.5) return 0.0;
    const double x = upper_quantile(q < 0.5 ? q : 1.0 - q);
    return q < 0.5 ? -x : x;
  }

  /// Solves P(T > x) = tail; resolves tails far below machine epsilon.
  [[nodiscard]] double upper_quantile(double tail) const {
    detail::require(tail > 0.0 && tail < 1.0, "t_upper_quantile: tail must lie in (0, 1)");
    if (tail == 0.5) return 0.0;
    if (tail > 0.5) return -upper_quantile(1.0 - tail);
    const double log_tail = std::log(tail);
    auto f = [&](double x) { return log_tail - std::log(half_tail(x)); };
    double hi = std::max(1.0, -normal_quantile(tail));
    double lo = 0.0;
    double fhi = f(hi);
    while (fhi < 0.0) {
      lo = hi;
      hi *= 2.0;
      fhi = f(hi);
      if (!std::isfinite(hi)) throw SolverError("t_quantile: bracket expansion overflow");
    }
    const double flo = f(lo);
    RootTolerances tol;
    tol.x_abs = 1e-300;
    tol.x_rel = 2 * std::numeric_limits<double>::epsilon();
    return brent_root(f, lo, hi, flo, fhi, tol).x;
  }

 private:
  // P(T > x) for x > 0.
  [[nodiscard]] double half_tail(double x) const {
    const double r = x / std::sqrt(nu_);
    const double r2 = r * r;  // t^2 / nu
    if (!std::isfinite(r2)) {
      // beyond double range of t^2: leading term of the power tail
      return std::exp(log_norm_ + 0.5 * (nu_ + 1.0) * std::log(nu_) - nu_ * std::log(x) -
                      std::log(nu_));
    }
    // x_b = nu / (nu + t^2), 1 - x_b = t^2 / (nu + t^2)
    const double xb = 1.0 / (1.0 + r2);
    const double xbc = r2 / (1.0 + r2);
    const double log_xb = -std::log1p(r2);
    const double log_xbc = -std::log1p(1.0 / r2);
    return 0.5 * detail::regularized_beta(0.5 * nu_, 0.5, xb, xbc, log_xb, log_xbc, beta_norm_);
  }

  double nu_;
  double log_norm_;
  double beta_norm_;  // log(1 / B(nu/2, 1/2))
};

inline double t_pdf(double x, DegreesOfFreedom nu) { return StudentT(nu).pdf(x); }
inline double t_cdf(double x, DegreesOfFreedom nu) { return StudentT(nu).cdf(x); }
inline double t_sf(double x, DegreesOfFreedom nu) { return StudentT(nu).sf(x); }
inline double t_quantile(double q, DegreesOfFreedom nu) { return StudentT(nu).quantile(q); }

// ---------------------------------------------------------------------------
// Samplers

inline double sample_normal(double mean, double variance, RandomStream& rng) {
  detail::require(variance > 0.0, "sample_normal: variance must be positive");
  return mean + std::sqrt(variance) * rng.standard_normal();
}

/// Gamma(shape, 1) by Marsaglia–Tsang; shape < 1 via the U^(1/shape) boost.
inline double sample_gamma(double shape, RandomStream& rng) {
  detail::require(shape > 0.0, "sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double sample_chi2(double df, RandomStream& rng) {
  detail::require(df > 0.0, "sample_chi2: degrees of freedom must be positive");
  return 2.0 * sample_gamma(0.5 * df, rng);
}

inline double sample_t(DegreesOfFreedom nu, RandomStream& rng) {
  const double z = rng.standard_normal();
  const double w = sample_chi2(nu.as_double(), rng) / nu.as_double();
  return z / std::sqrt(w);
}

}  // namespace ranksel
