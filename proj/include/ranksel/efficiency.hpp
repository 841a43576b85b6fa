#pragma once

/// Expected sample sizes and the relative efficiency of the two procedures.
///
/// Populations are exchangeable under an i.i.d. variance prior, so the
/// normalised expected total
///
///     alpha = sum_i E N_i / ((k + 1) (h / delta)^2) = E N_1 / (h / delta)^2
///
/// is estimated from a single population per replication:
/// sigma^2 ~ prior, S^2 = sigma^2 chi2_nu / nu, N_1 = second_stage_size(S^2).
/// Two estimates are reported.  `alpha` is the plain mean of
/// N_1 / (h / delta)^2 and never falls below (N0 + 1)(delta / h)^2.
/// `alpha_cv` uses S^2 as a control variate, E sigma^2 + mean(N_1 /
/// (h / delta)^2 - S^2), which removes the prior's variance from the error
/// and leaves the O((delta / h)^2) trend in k visible.
/// Replication r draws from rng.substream(r) for every k and both variants,
/// so rows and variants are compared under common random numbers.

#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "ranksel/distributions.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/hconst.hpp"
#include "ranksel/parallel.hpp"
#include "ranksel/prior.hpp"
#include "ranksel/procedures.hpp"
#include "ranksel/quadrature.hpp"
#include "ranksel/schedule.hpp"
#include "ranksel/stats.hpp"

namespace ranksel {

struct AlphaEstimate {
  long long k = 0;
  int n0 = 0;
  Variant variant = Variant::dudewicz_dalal;
  double alpha = 0.0;
  double standard_error = 0.0;
  double alpha_cv = 0.0;
  double cv_standard_error = 0.0;
  HConstant h;
};

/// 2^(2/nu): limit of the expected-total-sample ratio (Rinott over
/// Dudewicz–Dalal) for a fixed first-stage size.
inline double theoretical_eta(DegreesOfFreedom nu) { return std::exp2(2.0 / nu.as_double()); }

namespace detail {

/// First-stage variance estimate of one population in replication `s`.
inline double draw_stage1_variance(const VariancePrior& prior, int n0, RandomStream& s) {
  const double sigma2 = prior.draw(s);
  return sigma2 * sample_chi2(n0 - 1, s) / (n0 - 1);
}

inline void require_positive_h(const HConstant& h, long long k) {
  if (!(h.value > 0.0)) {
    throw SolverError("normalised sample size undefined: h = " + format_double(h.value) +
                      " is not positive at k = " + std::to_string(k));
  }
}

}  // namespace detail

/// Monte Carlo estimate of alpha for one variant.
inline AlphaEstimate estimate_alpha(long long k, DegreesOfFreedom nu, Probability p, double delta,
                                    const VariancePrior& prior, Variant variant,
                                    long long replications, const RandomStream& rng,
                                    unsigned threads = 1) {
  detail::require(delta > 0.0, "estimate_alpha: delta must be positive");
  detail::require(replications >= 2, "estimate_alpha: need at least two replications");
  const int n0 = nu.value() + 1;
  const HConstant h = solve_h({k, nu, p, variant});
  detail::require_positive_h(h, k);
  const double scale = (h.value / delta) * (h.value / delta);

  // (N_1 / scale, N_1 / scale - S^2)
  const auto blocks = parallel_blocks<PairAccumulator>(
      static_cast<std::size_t>(replications), threads, [&](std::size_t begin, std::size_t end) {
        PairAccumulator acc;
        for (std::size_t r = begin; r < end; ++r) {
          auto s = rng.substream(r);
          const double s2 = detail::draw_stage1_variance(prior, n0, s);
          const double y = static_cast<double>(second_stage_size(s2, h.value, delta, n0)) / scale;
          acc.add(y, y - s2);
        }
        return acc;
      });
  PairAccumulator total;
  for (const auto& b : blocks) total.merge(b);
  return {k, n0, variant, total.mean_x, total.se_x(), prior.mean() + total.mean_y, total.se_y(), h};
}

/// E max{L, sigma^2} under the prior, by Gauss–Legendre quadrature over
/// log sigma^2 split at log L.
inline double limit_maxmix(double L, const VariancePrior& prior) {
  detail::require(L >= 0.0 && std::isfinite(L), "limit_maxmix: L must be nonnegative");
  if (prior.kind() == VariancePrior::Kind::fixed) return std::max(L, prior.first());
  const auto [lo, hi] = prior.log_scale_support();
  auto integrand = [&](double y) { return std::max(L, std::exp(y)) * prior.log_scale_density(y); };
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-300;
  opt.initial_panels = 16;
  opt.max_panels = 1 << 14;
  double total = 0.0;
  const double cut = L > 0.0 ? std::log(L) : -std::numeric_limits<double>::infinity();
  if (cut <= lo) {
    total = integrate_panels(integrand, lo, hi, opt).value;
  } else if (cut >= hi) {
    // sigma^2 < L essentially surely
    total = L * integrate_panels([&](double y) { return prior.log_scale_density(y); }, lo, hi, opt).value;
  } else {
    total = integrate_panels(integrand, lo, cut, opt).value + integrate_panels(integrand, cut, hi, opt).value;
  }
  return total;
}

/// Plain Monte Carlo estimate of E max{L, sigma^2} (cross-check for
/// limit_maxmix).
inline MeanAccumulator limit_maxmix_mc(double L, const VariancePrior& prior, long long draws,
                                       const RandomStream& rng, unsigned threads = 1) {
  detail::require(draws >= 2, "limit_maxmix_mc: need at least two draws");
  const auto blocks = parallel_blocks<MeanAccumulator>(
      static_cast<std::size_t>(draws), threads, [&](std::size_t begin, std::size_t end) {
        MeanAccumulator acc;
        auto s = rng.substream(begin);
        for (std::size_t r = begin; r < end; ++r) acc.add(std::max(L, prior.draw(s)));
        return acc;
      },
      1 << 16);
  MeanAccumulator total;
  for (const auto& b : blocks) total.merge(b);
  return total;
}

struct EfficiencyRow {
  long long k = 0;
  int n0 = 0;
  int nu = 0;
  HConstant h_dd;
  HConstant h_rinott;
  double h_ratio = 0.0;       // h_rinott / h_dd
  double h_ratio_sq = 0.0;
  double alpha_dd = 0.0;
  double alpha_dd_se = 0.0;
  double alpha_rinott = 0.0;
  double alpha_rinott_se = 0.0;
  double alpha_dd_cv = 0.0;
  double alpha_dd_cv_se = 0.0;
  double alpha_rinott_cv = 0.0;
  double alpha_rinott_cv_se = 0.0;
  double alpha_ratio = 0.0;   // alpha_rinott / alpha_dd
  double sample_ratio = 0.0;  // sum E N^rinott / sum E N^dd
  double sample_ratio_se = 0.0;
  double lhat_dd = 0.0;       // N0 / (h_dd / delta)^2
  double lhat_rinott = 0.0;
  double maxmix_dd = 0.0;     // E max{lhat_dd, sigma^2}
  double maxmix_rinott = 0.0;
};

struct EfficiencyReport {
  std::vector<EfficiencyRow> rows;
  Schedule n0_schedule = Schedule::constant(2);
  double theoretical_eta = std::numeric_limits<double>::quiet_NaN();  // constant schedules only
};

/// Both procedures' alpha, their ratio and the h ratio at each k.
inline EfficiencyReport efficiency_curve(const std::vector<long long>& ks, const Schedule& n0_schedule,
                                         Probability p, double delta, const VariancePrior& prior,
                                         long long replications, const RandomStream& rng,
                                         unsigned threads = 1) {
  detail::require(!ks.empty(), "efficiency_curve: ks must be nonempty");
  for (std::size_t i = 1; i < ks.size(); ++i) {
    detail::require(ks[i] > ks[i - 1], "efficiency_curve: ks must be strictly ascending");
  }
  detail::require(delta > 0.0, "efficiency_curve: delta must be positive");
  detail::require(replications >= 2, "efficiency_curve: need at least two replications");

  EfficiencyReport report;
  report.n0_schedule = n0_schedule;
  long long previous_n0 = 0;
  for (long long k : ks) {
    const long long n0 = n0_schedule(k);
    detail::require(n0 >= 2 && n0 <= 1'000'000,
                    "efficiency_curve: schedule gives N0 = " + std::to_string(n0) + " at k = " +
                        std::to_string(k) + " (need N0 >= 2)");
    detail::require(n0 >= previous_n0, "efficiency_curve: N0 schedule must be nondecreasing");
    previous_n0 = n0;
    const DegreesOfFreedom nu(static_cast<int>(n0 - 1));

    EfficiencyRow row;
    row.k = k;
    row.n0 = static_cast<int>(n0);
    row.nu = nu.value();
    row.h_dd = solve_h({k, nu, p, Variant::dudewicz_dalal});
    row.h_rinott = solve_h({k, nu, p, Variant::rinott});
    detail::require_positive_h(row.h_dd, k);
    detail::require_positive_h(row.h_rinott, k);
    row.h_ratio = h_ratio(row.h_dd, row.h_rinott);
    row.h_ratio_sq = row.h_ratio * row.h_ratio;

    const double h1 = row.h_dd.value, h2 = row.h_rinott.value;
    const double scale1 = (h1 / delta) * (h1 / delta);
    const double scale2 = (h2 / delta) * (h2 / delta);
    const int n0i = row.n0;
    struct Block {
      PairAccumulator sizes;    // (N^dd, N^rinott)
      PairAccumulator excess;   // N / (h / delta)^2 - S^2 for both
    };
    const auto blocks = parallel_blocks<Block>(
        static_cast<std::size_t>(replications), threads, [&](std::size_t begin, std::size_t end) {
          Block acc;
          for (std::size_t r = begin; r < end; ++r) {
            auto s = rng.substream(r);
            const double s2 = detail::draw_stage1_variance(prior, n0i, s);
            const auto n1 = static_cast<double>(second_stage_size(s2, h1, delta, n0i));
            const auto n2 = static_cast<double>(second_stage_size(s2, h2, delta, n0i));
            acc.sizes.add(n1, n2);
            acc.excess.add(n1 / scale1 - s2, n2 / scale2 - s2);
          }
          return acc;
        });
    Block total;
    for (const auto& b : blocks) {
      total.sizes.merge(b.sizes);
      total.excess.merge(b.excess);
    }

    row.alpha_dd = total.sizes.mean_x / scale1;
    row.alpha_dd_se = total.sizes.se_x() / scale1;
    row.alpha_rinott = total.sizes.mean_y / scale2;
    row.alpha_rinott_se = total.sizes.se_y() / scale2;
    row.alpha_dd_cv = prior.mean() + total.excess.mean_x;
    row.alpha_dd_cv_se = total.excess.se_x();
    row.alpha_rinott_cv = prior.mean() + total.excess.mean_y;
    row.alpha_rinott_cv_se = total.excess.se_y();
    std::tie(row.sample_ratio, row.sample_ratio_se) = total.sizes.ratio();
    row.alpha_ratio = row.alpha_rinott / row.alpha_dd;
    row.lhat_dd = static_cast<double>(n0) / scale1;
    row.lhat_rinott = static_cast<double>(n0) / scale2;
    row.maxmix_dd = limit_maxmix(row.lhat_dd, prior);
    row.maxmix_rinott = limit_maxmix(row.lhat_rinott, prior);
    report.rows.push_back(row);
  }
  if (n0_schedule.kind() == Schedule::Kind::constant) {
    report.theoretical_eta = theoretical_eta(DegreesOfFreedom(report.rows.front().nu));
  }
  return report;
}

}  // namespace ranksel
