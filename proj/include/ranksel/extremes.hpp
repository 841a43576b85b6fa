#pragma once

/// Diagnostics for maxima of triangular arrays of Student-t variables.
///
/// For each k the array row holds k i.i.d. draws of either a t_nu variable or
/// the sum of two independent t_nu variables, with nu = nu(k) allowed to grow.
/// The report gives robust location/scale of the row maximum, Anderson–Darling
/// distances to maximum-likelihood Gumbel and Fréchet fits, and a Hill
/// estimate of the tail index.  No limit law is asserted.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranksel/distributions.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/parallel.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/roots.hpp"
#include "ranksel/schedule.hpp"
#include "ranksel/stats.hpp"

namespace ranksel {

enum class MaxStatistic { max_of_t, max_of_t_sum };

inline std::string_view to_string(MaxStatistic s) {
  return s == MaxStatistic::max_of_t ? "max-t" : "max-t-sum";
}

inline MaxStatistic parse_max_statistic(std::string_view s) {
  if (s == "max-t" || s == "max-of-t") return MaxStatistic::max_of_t;
  if (s == "max-t-sum" || s == "max-of-t-sum") return MaxStatistic::max_of_t_sum;
  throw DomainError("unknown statistic '" + std::string(s) + "' (expected max-t or max-t-sum)");
}

/// Maximum of k i.i.d. draws of the statistic's summand.
inline double sample_max(long long k, DegreesOfFreedom nu, MaxStatistic statistic, RandomStream& rng) {
  detail::require(k >= 1, "sample_max: k must be >= 1");
  double best = -std::numeric_limits<double>::infinity();
  for (long long i = 0; i < k; ++i) {
    double x = sample_t(nu, rng);
    if (statistic == MaxStatistic::max_of_t_sum) x += sample_t(nu, rng);
    best = std::max(best, x);
  }
  return best;
}

struct GumbelFit {
  double location = 0.0;
  double scale = 1.0;

  [[nodiscard]] double log_cdf(double x) const { return -std::exp(-(x - location) / scale); }
  [[nodiscard]] double log_sf(double x) const {
    return std::log(-std::expm1(-std::exp(-(x - location) / scale)));
  }
};

/// Two-parameter Fréchet, F(x) = exp(-(x / scale)^-shape) on x > 0.
struct FrechetFit {
  double scale = 1.0;
  double shape = 1.0;

  [[nodiscard]] double log_cdf(double x) const {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return -std::pow(x / scale, -shape);
  }
  [[nodiscard]] double log_sf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::log(-std::expm1(-std::pow(x / scale, -shape)));
  }
};

/// Gumbel maximum likelihood: the scale solves
///   beta = mean(x) - sum x e^(-x/beta) / sum e^(-x/beta),
/// then location = -beta log(mean e^(-x/beta)).  Exponents are shifted by
/// min(x) to stay finite.
inline GumbelFit fit_gumbel(std::span<const double> xs) {
  detail::require(xs.size() >= 2, "fit_gumbel: need at least two observations");
  const double xmin = *std::min_element(xs.begin(), xs.end());
  const double xmax = *std::max_element(xs.begin(), xs.end());
  detail::require(xmax > xmin, "fit_gumbel: sample is degenerate");
  MeanAccumulator m;
  for (double x : xs) m.add(x);

  auto weighted_mean = [&](double beta, double& log_mean_weight) {
    double sw = 0.0, swx = 0.0;
    for (double x : xs) {
      const double w = std::exp(-(x - xmin) / beta);
      sw += w;
      swx += w * x;
    }
    log_mean_weight = std::log(sw / static_cast<double>(xs.size()));
    return swx / sw;
  };
  auto score = [&](double beta) {
    double unused;
    return beta - m.mean + weighted_mean(beta, unused);
  };

  const double guess = std::sqrt(std::max(m.variance(), 1e-300)) * std::sqrt(6.0) / std::numbers::pi;
  double lo = guess * 1e-3, hi = guess * 4.0;
  double flo = score(lo), fhi = score(hi);
  for (int i = 0; i < 60 && flo > 0; ++i) flo = score(lo *= 0.1);
  for (int i = 0; i < 60 && fhi < 0; ++i) fhi = score(hi *= 4.0);
  RootTolerances tol;
  tol.x_abs = 0.0;
  tol.x_rel = 1e-13;
  const auto root = brent_root(score, lo, hi, flo, fhi, tol);
  double log_mean_weight;
  weighted_mean(root.x, log_mean_weight);
  return {xmin - root.x * log_mean_weight, root.x};
}

/// Fréchet maximum likelihood through log X ~ Gumbel(log scale, 1 / shape),
/// using the positive observations only.
inline FrechetFit fit_frechet(std::span<const double> xs) {
  std::vector<double> logs;
  logs.reserve(xs.size());
  for (double x : xs) {
    if (x > 0.0) logs.push_back(std::log(x));
  }
  detail::require(logs.size() >= 2, "fit_frechet: need at least two positive observations");
  const auto g = fit_gumbel(logs);
  return {std::exp(g.location), 1.0 / g.scale};
}

inline double anderson_darling(std::span<const double> sorted, const GumbelFit& f) {
  return anderson_darling(
      sorted, [&](double x) { return f.log_cdf(x); }, [&](double x) { return f.log_sf(x); });
}

inline double anderson_darling(std::span<const double> sorted, const FrechetFit& f) {
  return anderson_darling(
      sorted, [&](double x) { return f.log_cdf(x); }, [&](double x) { return f.log_sf(x); });
}

/// Hill estimate of the tail index from the top `fraction` of an ascending
/// sample; NaN when the threshold order statistic is not positive.
inline double hill_tail_index(std::span<const double> sorted, double fraction = 0.05) {
  detail::require(fraction > 0.0 && fraction < 1.0, "hill_tail_index: fraction must lie in (0, 1)");
  const std::size_t n = sorted.size();
  const std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * n));
  if (m + 1 > n) return std::numeric_limits<double>::quiet_NaN();
  const double threshold = sorted[n - m - 1];
  if (!(threshold > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (std::size_t i = n - m; i < n; ++i) s += std::log(sorted[i] / threshold);
  return static_cast<double>(m) / s;
}

struct TriangularArraySpec {
  std::vector<long long> ks;
  Schedule nu_schedule = Schedule::constant(3);
  MaxStatistic statistic = MaxStatistic::max_of_t;
  long long replications = 1000;
  double hill_fraction = 0.05;

  void validate() const {
    detail::require(!ks.empty(), "triangular array: ks must be nonempty");
    detail::require(ks.front() >= 1, "triangular array: k must be >= 1");
    for (std::size_t i = 1; i < ks.size(); ++i) {
      detail::require(ks[i] > ks[i - 1], "triangular array: ks must be strictly ascending");
    }
    detail::require(replications >= 100, "triangular array: replications must be >= 100, got " +
                                             std::to_string(replications));
    detail::require(hill_fraction > 0.0 && hill_fraction < 1.0,
                    "triangular array: Hill fraction must lie in (0, 1)");
  }
};

struct ExtremeFitRow {
  long long k = 0;
  int nu = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  GumbelFit gumbel;
  double gumbel_ad = 0.0;
  FrechetFit frechet;
  double frechet_ad = 0.0;
  double hill_tail_index = 0.0;
  long long nonpositive = 0;  // maxima outside the Fréchet support
};

struct ExtremeFitReport {
  MaxStatistic statistic = MaxStatistic::max_of_t;
  std::vector<ExtremeFitRow> rows;
};

/// Replication r of every row draws from rng.substream(r), so rows share
/// their underlying draws wherever nu(k) agrees.
inline ExtremeFitReport fit_extremes(const TriangularArraySpec& spec, const RandomStream& rng,
                                     unsigned threads = 1) {
  spec.validate();
  ExtremeFitReport report;
  report.statistic = spec.statistic;
  for (long long k : spec.ks) {
    const auto nu_value = spec.nu_schedule(k);
    detail::require(nu_value >= 1 && nu_value <= 100'000'000,
                    "triangular array: schedule gives invalid nu at k=" + std::to_string(k));
    const DegreesOfFreedom nu(static_cast<int>(nu_value));
    auto maxima = parallel_map<double>(
        static_cast<std::size_t>(spec.replications), threads,
        [&](std::size_t r) {
          auto s = rng.substream(r);
          return sample_max(k, nu, spec.statistic, s);
        },
        64);
    std::sort(maxima.begin(), maxima.end());

    ExtremeFitRow row;
    row.k = k;
    row.nu = nu.value();
    row.median = sorted_quantile(maxima, 0.5);
    row.q25 = sorted_quantile(maxima, 0.25);
    row.q75 = sorted_quantile(maxima, 0.75);
    row.iqr = row.q75 - row.q25;
    row.nonpositive = std::count_if(maxima.begin(), maxima.end(), [](double x) { return x <= 0.0; });
    row.gumbel = fit_gumbel(maxima);
    row.gumbel_ad = anderson_darling(maxima, row.gumbel);
    row.frechet = fit_frechet(maxima);
    row.frechet_ad = anderson_darling(maxima, row.frechet);
    row.hill_tail_index = hill_tail_index(maxima, spec.hill_fraction);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace ranksel
