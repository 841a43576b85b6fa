#pragma once

// Sample summaries and goodness-of-fit statistics.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "ranksel/errors.hpp"

namespace ranksel {

/// Running mean/variance (Welford), mergeable in a fixed order.
struct MeanAccumulator {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const MeanAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  [[nodiscard]] double variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  [[nodiscard]] double standard_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

/// Paired running moments (means, variances, covariance), mergeable in a
/// fixed order.
struct PairAccumulator {
  long long n = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double m2_x = 0.0, m2_y = 0.0, c_xy = 0.0;

  void add(double x, double y) {
    ++n;
    const double nn = static_cast<double>(n);
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    mean_x += dx / nn;
    mean_y += dy / nn;
    m2_x += dx * (x - mean_x);
    m2_y += dy * (y - mean_y);
    c_xy += dx * (y - mean_y);
  }

  void merge(const PairAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double n1 = static_cast<double>(n), n2 = static_cast<double>(o.n);
    const double total = n1 + n2;
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    mean_x += dx * n2 / total;
    mean_y += dy * n2 / total;
    m2_x += o.m2_x + dx * dx * n1 * n2 / total;
    m2_y += o.m2_y + dy * dy * n1 * n2 / total;
    c_xy += o.c_xy + dx * dy * n1 * n2 / total;
    n += o.n;
  }

  [[nodiscard]] double var_x() const { return n > 1 ? m2_x / static_cast<double>(n - 1) : 0.0; }
  [[nodiscard]] double var_y() const { return n > 1 ? m2_y / static_cast<double>(n - 1) : 0.0; }
  [[nodiscard]] double cov() const { return n > 1 ? c_xy / static_cast<double>(n - 1) : 0.0; }
  [[nodiscard]] double se_x() const { return n > 0 ? std::sqrt(var_x() / static_cast<double>(n)) : 0.0; }
  [[nodiscard]] double se_y() const { return n > 0 ? std::sqrt(var_y() / static_cast<double>(n)) : 0.0; }

  /// mean_y / mean_x and its delta-method standard error.
  [[nodiscard]] std::pair<double, double> ratio() const {
    const double r = mean_y / mean_x;
    const double v = var_y() - 2.0 * r * cov() + r * r * var_x();
    return {r, std::sqrt(std::max(0.0, v) / static_cast<double>(n)) / std::fabs(mean_x)};
  }
};

/// Binomial proportion with its plug-in standard error.
struct ProportionEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  long long trials = 0;
};

inline ProportionEstimate make_proportion(long long successes, long long trials) {
  detail::require(trials > 0, "proportion needs at least one trial");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

/// Type-7 (linear interpolation) quantile of an ascending sample.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  detail::require(!sorted.empty(), "sorted_quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// One-sample Kolmogorov–Smirnov distance sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  detail::require(!sample.empty(), "ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Two-sample Kolmogorov–Smirnov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

/// Asymptotic Kolmogorov critical value c(alpha) = sqrt(-ln(alpha/2) / 2).
inline double kolmogorov_critical(double alpha) { return std::sqrt(-0.5 * std::log(0.5 * alpha)); }

inline double ks_critical_value(std::size_t n, double alpha) {
  return kolmogorov_critical(alpha) / std::sqrt(static_cast<double>(n));
}

inline double ks_two_sample_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return kolmogorov_critical(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

/// Anderson–Darling A^2 of an ascending sample against a continuous law given
/// by log F and log(1 - F).  Both logs are floored at log(1e-300) so samples
/// outside the model's support give a large but finite distance.
template <class LogCdf, class LogSf>
double anderson_darling(std::span<const double> sorted, LogCdf&& log_cdf, LogSf&& log_sf) {
  detail::require(!sorted.empty(), "anderson_darling: empty sample");
  constexpr double kFloor = -690.7755278982137;  // log(1e-300)
  const std::size_t n = sorted.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lf = std::max(kFloor, log_cdf(sorted[i]));
    const double ls = std::max(kFloor, log_sf(sorted[n - 1 - i]));
    s += (2.0 * static_cast<double>(i) + 1.0) * (lf + ls);
  }
  return -static_cast<double>(n) - s / static_cast<double>(n);
}

}  // namespace ranksel
