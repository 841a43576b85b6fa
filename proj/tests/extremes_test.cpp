#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ranksel/extremes.hpp"

using namespace ranksel;

namespace {
DegreesOfFreedom df(int v) { return DegreesOfFreedom(v); }
}  // namespace

TEST(SampleMax, KOneIsASingleDraw) {
  RandomStream a(71), b(71);
  EXPECT_EQ(sample_max(1, df(4), MaxStatistic::max_of_t, a), sample_t(df(4), b));
}

TEST(SampleMax, DeterministicAndMonotoneUnderCoupling) {
  for (auto stat : {MaxStatistic::max_of_t, MaxStatistic::max_of_t_sum}) {
    for (int r = 0; r < 200; ++r) {
      const RandomStream s(72, {static_cast<std::uint64_t>(r)});
      auto a = s, b = s, c = s;
      const double m = sample_max(37, df(3), stat, a);
      ASSERT_EQ(m, sample_max(37, df(3), stat, b));
      ASSERT_GE(sample_max(38, df(3), stat, c), m);
    }
  }
  RandomStream s(1);
  EXPECT_THROW(sample_max(0, df(3), MaxStatistic::max_of_t, s), DomainError);
}

TEST(SampleMax, SumSummandIsSymmetric) {
  RandomStream s(73);
  const int n = 200'000;
  int positive = 0;
  for (int i = 0; i < n; ++i) positive += sample_max(1, df(3), MaxStatistic::max_of_t_sum, s) > 0.0;
  EXPECT_NEAR(positive, n / 2, 3.0 * std::sqrt(n * 0.25));
}

TEST(SampleMax, UpperQuantileMatchesRegularVariation) {
  const int nu = 3;
  const long long k = 1000;
  const StudentT t(df(nu));
  // tail constant c in P(T > x) ~ c x^-nu
  const double x = 1e5;
  const double c = t.sf(x) * std::pow(x, nu);
  const double predicted = std::pow(k * c / -std::log(0.99), 1.0 / nu);

  const RandomStream root(74);
  std::vector<double> maxima(10'000);
  for (std::size_t r = 0; r < maxima.size(); ++r) {
    auto s = root.substream(r);
    maxima[r] = sample_max(k, df(nu), MaxStatistic::max_of_t, s);
  }
  std::sort(maxima.begin(), maxima.end());
  EXPECT_NEAR(sorted_quantile(maxima, 0.99) / predicted, 1.0, 0.10);
}

TEST(Fits, GumbelRecoversParameters) {
  RandomStream s(75);
  std::vector<double> xs(50'000);
  for (auto& x : xs) x = 3.0 - 2.0 * std::log(-std::log(s.uniform()));
  const auto g = fit_gumbel(xs);
  EXPECT_NEAR(g.location, 3.0, 0.05);
  EXPECT_NEAR(g.scale, 2.0, 0.03);
  std::sort(xs.begin(), xs.end());
  EXPECT_LT(anderson_darling(xs, g), 3.9);
}

TEST(Fits, FrechetRecoversParameters) {
  RandomStream s(76);
  std::vector<double> xs(50'000);
  for (auto& x : xs) x = 1.5 * std::pow(-std::log(s.uniform()), -1.0 / 2.5);
  const auto f = fit_frechet(xs);
  EXPECT_NEAR(f.scale, 1.5, 0.02);
  EXPECT_NEAR(f.shape, 2.5, 0.04);
  std::sort(xs.begin(), xs.end());
  EXPECT_LT(anderson_darling(xs, f), 3.9);
  EXPECT_GT(anderson_darling(xs, fit_gumbel(xs)), 50.0);
}

TEST(Fits, RejectDegenerateSamples) {
  EXPECT_THROW(fit_gumbel(std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(fit_gumbel(std::vector<double>{2.0, 2.0, 2.0}), DomainError);
  EXPECT_THROW(fit_frechet(std::vector<double>{-1.0, -2.0, 3.0}), DomainError);
}

TEST(Hill, ParetoIndexAndUndefinedCase) {
  RandomStream s(77);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = std::pow(s.uniform(), -1.0 / 3.0);
  std::sort(xs.begin(), xs.end());
  EXPECT_NEAR(hill_tail_index(xs, 0.05), 3.0, 0.15);
  const std::vector<double> negative{-5.0, -4.0, -3.0, -2.0, -1.0};
  EXPECT_TRUE(std::isnan(hill_tail_index(negative, 0.5)));
  EXPECT_THROW(hill_tail_index(xs, 1.5), DomainError);
}

TEST(FitExtremes, FixedNuFavoursFrechet) {
  TriangularArraySpec spec{{10, 100, 1000}, Schedule::constant(3), MaxStatistic::max_of_t, 4000, 0.05};
  const auto report = fit_extremes(spec, RandomStream(78), 2);
  ASSERT_EQ(report.rows.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_LT(report.rows[i].frechet_ad, report.rows[i - 1].frechet_ad);
  EXPECT_LT(report.rows[2].frechet_ad, report.rows[2].gumbel_ad);
  for (const auto& r : report.rows) {
    EXPECT_GE(r.gumbel_ad, 0.0);
    EXPECT_GE(r.frechet_ad, 0.0);
    EXPECT_GT(r.hill_tail_index, 0.0);
    EXPECT_NEAR(r.iqr, r.q75 - r.q25, 1e-15);
    EXPECT_LE(r.q25, r.median);
    EXPECT_LE(r.median, r.q75);
  }
}

TEST(FitExtremes, GrowingNuRunsAndIsDeterministic) {
  TriangularArraySpec spec{{10, 100}, Schedule::identity(0), MaxStatistic::max_of_t_sum, 500, 0.05};
  const auto a = fit_extremes(spec, RandomStream(79), 1);
  const auto b = fit_extremes(spec, RandomStream(79), 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].nu, static_cast<int>(a.rows[i].k));
    EXPECT_EQ(a.rows[i].median, b.rows[i].median);
    EXPECT_EQ(a.rows[i].gumbel_ad, b.rows[i].gumbel_ad);
  }
}

TEST(FitExtremes, Validation) {
  TriangularArraySpec spec{{10}, Schedule::constant(3), MaxStatistic::max_of_t, 10, 0.05};
  EXPECT_THROW(fit_extremes(spec, RandomStream(1)), DomainError);
  spec.replications = 100;
  spec.ks = {100, 10};
  EXPECT_THROW(fit_extremes(spec, RandomStream(1)), DomainError);
  EXPECT_EQ(parse_max_statistic("max-t-sum"), MaxStatistic::max_of_t_sum);
  EXPECT_THROW(parse_max_statistic("min"), DomainError);
}
