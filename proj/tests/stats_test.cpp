#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ranksel/distributions.hpp"
#include "ranksel/stats.hpp"

using namespace ranksel;

TEST(MeanAccumulator, MergeMatchesSinglePass) {
  MeanAccumulator all, a, b;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i) * 10.0 + i * 0.1;
    all.add(x);
    (i < 37 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.n, all.n);
  EXPECT_NEAR(a.mean, all.mean, 1e-12);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-10);
}

TEST(PairAccumulator, RatioStandardErrorMatchesResampling) {
  RandomStream s(5);
  PairAccumulator acc;
  for (int i = 0; i < 200'000; ++i) {
    const double x = 10.0 + s.standard_normal();
    acc.add(x, 2.0 * x + 0.5 * s.standard_normal());
  }
  const auto [r, se] = acc.ratio();
  EXPECT_NEAR(r, 2.0, 5.0 * se);
  // var(Y - 2X) / n / E[X]^2
  EXPECT_NEAR(se, std::sqrt(0.25 / 2e5) / 10.0, 0.05 * se);
  EXPECT_NEAR(acc.cov(), 2.0, 0.03);
}

TEST(Quantiles, TypeSeven) {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(sorted_quantile(xs, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sorted_quantile(xs, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(xs, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(xs, 0.25), 1.75);
}

TEST(KolmogorovSmirnov, DetectsShiftAndAcceptsTruth) {
  RandomStream s(6);
  std::vector<double> z(20'000), shifted(20'000);
  for (auto& x : z) x = s.standard_normal();
  for (auto& x : shifted) x = s.standard_normal() + 0.1;
  const double crit = ks_critical_value(z.size(), 0.001);
  EXPECT_LT(ks_statistic(z, normal_cdf), crit);
  EXPECT_GT(ks_statistic(shifted, normal_cdf), crit);
  EXPECT_GT(ks_two_sample(z, shifted), ks_two_sample_critical_value(z.size(), shifted.size(), 0.001));
  EXPECT_NEAR(kolmogorov_critical(0.05), 1.3581, 1e-4);
}

TEST(AndersonDarling, SmallForTrueModelLargeForWrong) {
  RandomStream s(7);
  std::vector<double> z(5000);
  for (auto& x : z) x = s.standard_normal();
  std::sort(z.begin(), z.end());
  auto lc = [](double x) { return std::log(normal_cdf(x)); };
  auto ls = [](double x) { return std::log(normal_cdf(-x)); };
  EXPECT_LT(anderson_darling(z, lc, ls), 3.9);  // 1% point of the asymptotic law
  auto lc2 = [](double x) { return std::log(normal_cdf(x / 2)); };
  auto ls2 = [](double x) { return std::log(normal_cdf(-x / 2)); };
  EXPECT_GT(anderson_darling(z, lc2, ls2), 50.0);
}

TEST(Proportion, StandardError) {
  const auto p = make_proportion(900, 1000);
  EXPECT_DOUBLE_EQ(p.estimate, 0.9);
  EXPECT_NEAR(p.standard_error, std::sqrt(0.09 / 1000), 1e-15);
  EXPECT_THROW(make_proportion(0, 0), DomainError);
}
