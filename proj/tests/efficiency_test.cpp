#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ranksel/efficiency.hpp"

using namespace ranksel;

namespace {

DegreesOfFreedom df(int v) { return DegreesOfFreedom(v); }

// E max{c, S^2} for S^2 = sigma2 chi2_nu / nu, by quadrature on the chi-square density.
double expected_max_with_floor(double c, double sigma2, int nu) {
  const double half = 0.5 * nu;
  auto chi2_pdf = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) - std::lgamma(half));
  };
  auto f = [&](double y) { return std::max(c, y) * chi2_pdf(nu * y / sigma2) * nu / sigma2; };
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  opt.max_panels = 1 << 16;
  const double cut = c, top = sigma2 * (10.0 + 40.0 / nu) * 10.0;
  return integrate_panels(f, 0.0, cut, opt).value + integrate_panels(f, cut, top, opt).value;
}

}  // namespace

TEST(TheoreticalEta, ExactValues) {
  EXPECT_EQ(theoretical_eta(df(2)), 2.0);
  EXPECT_EQ(theoretical_eta(df(4)), std::sqrt(2.0));
  EXPECT_NEAR(theoretical_eta(df(1000)), 1.001387, 1e-6);
}

TEST(EstimateAlpha, FixedPriorTendsToVariance) {
  const auto est = estimate_alpha(10'000, df(4), Probability(0.9), 1.0, VariancePrior::fixed(1.0),
                                  Variant::dudewicz_dalal, 200'000, RandomStream(51));
  const double slack = 1.0 / (est.h.value * est.h.value);
  EXPECT_GE(est.alpha, 1.0 - 3.0 * est.standard_error);
  EXPECT_LE(est.alpha, 1.0 + slack + 3.0 * est.standard_error);
  EXPECT_GE(est.alpha_cv, 1.0 - 3.0 * est.cv_standard_error);
  EXPECT_LE(est.alpha_cv, 1.0 + slack + 3.0 * est.cv_standard_error);
  EXPECT_LT(est.cv_standard_error, est.standard_error);
}

TEST(EstimateAlpha, FloorDominatesForTinyVariances) {
  const auto est = estimate_alpha(100, df(4), Probability(0.9), 1.0, VariancePrior::fixed(1e-6),
                                  Variant::rinott, 1000, RandomStream(52));
  const double floor = 6.0 / (est.h.value * est.h.value);  // N = N0 + 1 = 6
  EXPECT_NEAR(est.alpha, floor, 1e-14);
  EXPECT_EQ(est.standard_error, 0.0);
}

TEST(EstimateAlpha, NeverBelowFloor) {
  for (long long k : {5LL, 50LL, 500LL}) {
    for (auto v : {Variant::dudewicz_dalal, Variant::rinott}) {
      const auto est = estimate_alpha(k, df(3), Probability(0.8), 0.5, VariancePrior::lognormal(-2.0, 1.5),
                                      v, 5000, RandomStream(53));
      EXPECT_GE(est.alpha, 4.0 * (0.5 / est.h.value) * (0.5 / est.h.value));
    }
  }
}

TEST(EstimateAlpha, CeilingSandwichForFixedPrior) {
  const double sigma2 = 1.7, delta = 1.0;
  const int nu = 6;
  const auto est = estimate_alpha(30, df(nu), Probability(0.9), delta, VariancePrior::fixed(sigma2),
                                  Variant::dudewicz_dalal, 400'000, RandomStream(54));
  const double scale = est.h.value * est.h.value;
  const double lower = expected_max_with_floor((nu + 2) / scale, sigma2, nu);
  EXPECT_GE(est.alpha, lower - 3.0 * est.standard_error);
  EXPECT_LE(est.alpha, lower + 1.0 / scale + 3.0 * est.standard_error);
}

TEST(EstimateAlpha, SinglePopulationMatchesAllPopulations) {
  const long long k = 5;
  const int n0 = 4;
  const auto prior = VariancePrior::inverse_gamma(3.0, 4.0);
  const auto h = solve_h({k, df(n0 - 1), Probability(0.9), Variant::rinott});
  const double scale = h.value * h.value;
  const RandomStream root(55);
  MeanAccumulator all;
  for (int r = 0; r < 100'000; ++r) {
    auto s = root.substream(r);
    double sum = 0.0;
    for (long long i = 0; i <= k; ++i) {
      const double s2 = prior.draw(s) * sample_chi2(n0 - 1, s) / (n0 - 1);
      sum += static_cast<double>(second_stage_size(s2, h.value, 1.0, n0));
    }
    all.add(sum / ((k + 1) * scale));
  }
  const auto one = estimate_alpha(k, df(n0 - 1), Probability(0.9), 1.0, prior, Variant::rinott, 100'000,
                                  RandomStream(56));
  EXPECT_NEAR(one.alpha, all.mean, 3.0 * std::hypot(one.standard_error, all.standard_error()));
}

TEST(EstimateAlpha, InverseGammaTrendTowardPriorMean) {
  const auto prior = VariancePrior::inverse_gamma(3.0, 4.0);
  double prev = 1e300;
  for (long long k : {100LL, 1000LL, 10'000LL}) {
    const auto est = estimate_alpha(k, df(4), Probability(0.9), 1.0, prior, Variant::dudewicz_dalal,
                                    100'000, RandomStream(57));
    EXPECT_GT(est.alpha_cv, 2.0 - 3.0 * est.cv_standard_error);
    EXPECT_LT(est.alpha_cv, prev);
    prev = est.alpha_cv;
  }
}

TEST(LimitMaxmix, EdgeCases) {
  const auto ig = VariancePrior::inverse_gamma(3.0, 4.0);
  EXPECT_NEAR(limit_maxmix(0.0, ig), 2.0, 1e-9);
  EXPECT_NEAR(limit_maxmix(1e6, ig) / 1e6, 1.0, 1e-9);
  EXPECT_NEAR(limit_maxmix(0.0, VariancePrior::lognormal(0.3, 0.8)), std::exp(0.3 + 0.32), 1e-9);
  EXPECT_EQ(limit_maxmix(3.0, VariancePrior::fixed(2.0)), 3.0);
  EXPECT_EQ(limit_maxmix(1.0, VariancePrior::fixed(2.0)), 2.0);
  EXPECT_THROW(limit_maxmix(-1.0, ig), DomainError);
}

TEST(LimitMaxmix, AgreesWithMonteCarlo) {
  for (const auto& prior : {VariancePrior::inverse_gamma(3.0, 4.0), VariancePrior::lognormal(0.0, 1.0)}) {
    const auto mc = limit_maxmix_mc(2.0, prior, 10'000'000, RandomStream(58));
    EXPECT_NEAR(limit_maxmix(2.0, prior), mc.mean, 3.0 * mc.standard_error()) << prior.to_string();
  }
}

TEST(EfficiencyCurve, KOneRowIsNeutral) {
  const auto report = efficiency_curve({1, 10}, Schedule::constant(5), Probability(0.9), 1.0,
                                       VariancePrior::inverse_gamma(3.0, 4.0), 20'000, RandomStream(59));
  const auto& r = report.rows[0];
  EXPECT_NEAR(r.h_ratio, 1.0, 1e-10);
  EXPECT_NEAR(r.alpha_ratio, 1.0, 3.0 * r.alpha_dd_se / r.alpha_dd + 1e-9);
  EXPECT_NEAR(r.sample_ratio, 1.0, 1e-12);
  EXPECT_EQ(report.theoretical_eta, std::sqrt(2.0));
  EXPECT_GT(report.rows[1].h_rinott.value, report.rows[1].h_dd.value);
}

TEST(EfficiencyCurve, RatioMovesTowardEta) {
  const auto report = efficiency_curve({100, 1000, 10'000}, Schedule::constant(3), Probability(0.9), 1.0,
                                       VariancePrior::inverse_gamma(3.0, 4.0), 20'000, RandomStream(60));
  double prev_gap = 1e300;
  for (const auto& r : report.rows) {
    const double gap = 2.0 - r.sample_ratio;
    EXPECT_GT(gap, -3.0 * r.sample_ratio_se);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
}

TEST(EfficiencyCurve, LogScheduleReportsLimitColumns) {
  const auto prior = VariancePrior::inverse_gamma(3.0, 4.0);
  const auto report = efficiency_curve({10, 100, 1000}, Schedule::logarithmic(2), Probability(0.9), 1.0,
                                       prior, 20'000, RandomStream(61));
  EXPECT_TRUE(std::isnan(report.theoretical_eta));
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.n0, static_cast<int>(std::ceil(std::log(static_cast<double>(r.k)))) + 2);
    EXPECT_NEAR(r.lhat_dd, r.n0 / (r.h_dd.value * r.h_dd.value), 1e-15);
    EXPECT_NEAR(r.maxmix_dd, limit_maxmix(r.lhat_dd, prior), 1e-12);
  }
}

TEST(EfficiencyCurve, DeterministicAcrossThreads) {
  auto run = [](unsigned threads) {
    return efficiency_curve({5, 50}, Schedule::constant(4), Probability(0.95), 1.0,
                            VariancePrior::lognormal(0.0, 0.5), 10'000, RandomStream(62), threads);
  };
  const auto a = run(1), b = run(4);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].alpha_dd, b.rows[i].alpha_dd);
    EXPECT_EQ(a.rows[i].sample_ratio, b.rows[i].sample_ratio);
  }
}

TEST(EfficiencyCurve, Validation) {
  const auto prior = VariancePrior::fixed(1.0);
  EXPECT_THROW(efficiency_curve({10, 5}, Schedule::constant(4), Probability(0.9), 1.0, prior, 100, RandomStream(1)),
               DomainError);
  EXPECT_THROW(efficiency_curve({10}, Schedule::constant(1), Probability(0.9), 1.0, prior, 100, RandomStream(1)),
               DomainError);
  EXPECT_THROW(efficiency_curve({10}, Schedule::constant(4), Probability(0.9), 0.0, prior, 100, RandomStream(1)),
               DomainError);
  // p below one half gives h <= 0 at k = 1, where alpha is undefined
  EXPECT_THROW(efficiency_curve({1}, Schedule::constant(4), Probability(0.3), 1.0, prior, 100, RandomStream(1)),
               SolverError);
}
