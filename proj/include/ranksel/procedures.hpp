#pragma once

/// Two-stage selection of the population with the largest mean.
///
/// Stage 1 draws N0 observations per population and estimates its variance
/// S^2.  Stage 2 tops each population up to
///
///     N = max{ N0 + 1, ceil((h / delta)^2 S^2) }
///
/// observations.  Dudewicz–Dalal then ranks populations by a weighted mean
/// whose weights make (weighted mean - theta) * h / delta exactly t_nu;
/// Rinott ranks by the plain mean of all N observations.
///
/// Two sampling paths are provided.  `observations` draws every Gaussian
/// observation.  `summary` draws the sufficient statistics directly: the
/// stage-1 mean as N(theta, sigma^2 / N0), S^2 as sigma^2 chi2_{N0-1} / (N0-1)
/// (independent of the mean), and the stage-2 mean as
/// N(theta, sigma^2 / (N - N0)).  Both give the same joint law.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ranksel/distributions.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/hconst.hpp"
#include "ranksel/parallel.hpp"
#include "ranksel/prior.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/stats.hpp"

namespace ranksel {

enum class SamplingPath { summary, observations };

inline std::string_view to_string(SamplingPath p) {
  return p == SamplingPath::summary ? "summary" : "observations";
}

inline SamplingPath parse_sampling_path(std::string_view s) {
  if (s == "summary" || s == "fast") return SamplingPath::summary;
  if (s == "observations" || s == "direct") return SamplingPath::observations;
  throw DomainError("unknown sampling path '" + std::string(s) + "'");
}

struct ProcedureParams {
  Probability p;
  double delta;
  long long k;  // k + 1 populations
  int n0;
  Variant variant;
  SamplingPath path = SamplingPath::summary;

  void validate() const {
    detail::require(delta > 0.0 && std::isfinite(delta), "procedure: delta must be positive");
    detail::require(k >= 1, "procedure: k must be >= 1");
    detail::require(n0 >= 2, "procedure: N0 must be >= 2");
  }
  [[nodiscard]] DegreesOfFreedom nu() const { return DegreesOfFreedom(n0 - 1); }
  [[nodiscard]] HEquationSpec h_spec() const { return {k, nu(), p, variant}; }
};

struct ProblemInstance {
  std::vector<double> means;
  std::vector<double> variances;
  std::size_t best_index = 0;
};

/// Means 0, -gap, -2 gap, ...; population 0 is best.
inline ProblemInstance make_slippage_instance(const ProcedureParams& params, double gap,
                                              std::vector<double> variances) {
  params.validate();
  if (!(gap > params.delta)) {
    throw DomainError("mean gap " + detail::format_double(gap) +
                      " violates Theta(delta): every pairwise gap must exceed delta = " +
                      detail::format_double(params.delta));
  }
  const auto populations = static_cast<std::size_t>(params.k + 1);
  detail::require(variances.size() == populations,
                  "slippage instance: need k + 1 = " + std::to_string(populations) + " variances");
  for (double v : variances) {
    detail::require(v > 0.0 && std::isfinite(v), "slippage instance: variances must be positive");
  }
  ProblemInstance inst;
  inst.means.resize(populations);
  for (std::size_t i = 0; i < populations; ++i) inst.means[i] = -gap * static_cast<double>(i);
  inst.variances = std::move(variances);
  inst.best_index = 0;
  return inst;
}

inline std::vector<double> draw_variances(const VariancePrior& prior, std::size_t count,
                                          RandomStream& rng) {
  detail::require(count >= 1, "draw_variances: count must be >= 1");
  std::vector<double> out(count);
  for (auto& v : out) v = prior.draw(rng);
  return out;
}

struct PopulationStage1 {
  double mean = 0.0;
  double variance = 0.0;  // unbiased S^2
  int n = 0;
};

struct Stage1Summary {
  std::vector<PopulationStage1> populations;
};

namespace detail {

inline PopulationStage1 stage1_draw(double mean, double variance, int n0, SamplingPath path,
                                    RandomStream& s) {
  PopulationStage1 out;
  out.n = n0;
  if (path == SamplingPath::summary) {
    out.mean = mean + std::sqrt(variance / n0) * s.standard_normal();
    out.variance = variance * sample_chi2(n0 - 1, s) / (n0 - 1);
    return out;
  }
  std::vector<double> xs(static_cast<std::size_t>(n0));
  for (auto& x : xs) x = mean + std::sqrt(variance) * s.standard_normal();
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / n0;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.variance = ss / (n0 - 1);
  return out;
}

/// Mean of `count` fresh observations from N(mean, variance).
inline double stage2_mean(double mean, double variance, long long count, SamplingPath path,
                          RandomStream& s) {
  if (path == SamplingPath::summary) {
    return mean + std::sqrt(variance / static_cast<double>(count)) * s.standard_normal();
  }
  double sum = 0.0;
  for (long long j = 0; j < count; ++j) sum += mean + std::sqrt(variance) * s.standard_normal();
  return sum / static_cast<double>(count);
}

}  // namespace detail

/// Stage 1 for every population; population i draws from rng.substream(i).
inline Stage1Summary run_stage1(const ProblemInstance& instance, int n0, const RandomStream& rng,
                                SamplingPath path = SamplingPath::summary) {
  detail::require(n0 >= 2, "run_stage1: N0 must be >= 2");
  Stage1Summary out;
  out.populations.reserve(instance.means.size());
  for (std::size_t i = 0; i < instance.means.size(); ++i) {
    auto s = rng.substream(i);
    out.populations.push_back(
        detail::stage1_draw(instance.means[i], instance.variances[i], n0, path, s));
  }
  return out;
}

/// max{N0 + 1, ceil((h / delta)^2 S^2)}.  S^2 = 0 (impossible under the
/// model) yields N0 + 1.
inline long long second_stage_size(double s2, double h, double delta, int n0) {
  detail::require(s2 >= 0.0 && std::isfinite(s2), "second_stage_size: S^2 must be nonnegative");
  detail::require(delta > 0.0 && std::isfinite(delta), "second_stage_size: delta must be positive");
  detail::require(n0 >= 2, "second_stage_size: N0 must be >= 2");
  const double scale = (h / delta) * (h / delta);
  const double target = std::ceil(scale * s2);
  if (!(target < 9.0e18)) throw DomainError("second_stage_size: sample size overflows");
  return std::max<long long>(n0 + 1, static_cast<long long>(target));
}

/// Stage-wise constant Dudewicz–Dalal weights: `first` on each of the N0
/// stage-1 observations, `second` on each of the N - N0 stage-2 ones.
struct BlockWeights {
  double first = 0.0;
  double second = 0.0;
  int n0 = 0;
  long long n = 0;
};

/// Solves  N0 a + (N - N0) b = 1,  S^2 (N0 a^2 + (N - N0) b^2) = (delta / h)^2.
/// The two roots are a = 1/N +- d; both sit at the same distance from uniform
/// weights, and the root with a >= 1/N (stage-1 observations weighted at
/// least uniformly) is returned.
inline BlockWeights dd_block_weights(int n0, long long n, double s2, double h, double delta) {
  detail::require(n0 >= 2, "dd_weights: N0 must be >= 2");
  detail::require(n >= n0 + 1, "dd_weights: N must be >= N0 + 1");
  detail::require(s2 > 0.0 && std::isfinite(s2), "dd_weights: S^2 must be positive");
  detail::require(delta > 0.0 && h != 0.0, "dd_weights: need delta > 0 and h != 0");
  const double nn = static_cast<double>(n);
  const double n1 = n0;
  const double n2 = nn - n1;
  const double target = (delta / h) * (delta / h) / s2;  // required sum of squares
  // N0 a^2 N - 2 N0 a + (1 - target n2) = 0  =>  a = 1/N +- sqrt(n2 (N target - 1) / N0) / N
  double disc = n2 * (nn * target - 1.0) / n1;
  if (disc < 0.0) {
    if (disc > -1e-12 * n2) {
      disc = 0.0;
    } else {
      throw DomainError("dd_weights: N is below (h/delta)^2 S^2, weight system infeasible");
    }
  }
  BlockWeights w;
  w.n0 = n0;
  w.n = n;
  w.first = (1.0 + std::sqrt(disc)) / nn;
  w.second = (1.0 - n1 * w.first) / n2;
  return w;
}

inline std::vector<double> dd_weights(int n0, long long n, double s2, double h, double delta) {
  const auto w = dd_block_weights(n0, n, s2, h, delta);
  std::vector<double> out(static_cast<std::size_t>(n), w.second);
  std::fill(out.begin(), out.begin() + n0, w.first);
  return out;
}

struct ProcedureOutcome {
  std::size_t selected_index = 0;
  std::vector<long long> sample_sizes;
  long long total_samples = 0;
  bool correct = false;
  std::vector<double> statistics;  // per-population ranking statistic
};

/// One run of the procedure; population i draws from rng.substream(i).
inline ProcedureOutcome run_procedure(const ProblemInstance& instance, const ProcedureParams& params,
                                      const HConstant& h, const RandomStream& rng) {
  params.validate();
  const auto populations = static_cast<std::size_t>(params.k + 1);
  if (instance.means.size() != populations || instance.variances.size() != populations) {
    throw DomainError("run_procedure: instance has " + std::to_string(instance.means.size()) +
                      " populations, parameters expect k + 1 = " + std::to_string(populations));
  }
  ProcedureOutcome out;
  out.sample_sizes.resize(populations);
  out.statistics.resize(populations);
  for (std::size_t i = 0; i < populations; ++i) {
    auto s = rng.substream(i);
    const double theta = instance.means[i];
    const double var = instance.variances[i];
    const auto st1 = detail::stage1_draw(theta, var, params.n0, params.path, s);
    const long long n = second_stage_size(st1.variance, h.value, params.delta, params.n0);
    const long long extra = n - params.n0;
    const double mean2 = detail::stage2_mean(theta, var, extra, params.path, s);
    double stat;
    if (params.variant == Variant::dudewicz_dalal) {
      const auto w = dd_block_weights(params.n0, n, st1.variance, h.value, params.delta);
      stat = w.first * params.n0 * st1.mean + w.second * static_cast<double>(extra) * mean2;
    } else {
      stat = (params.n0 * st1.mean + static_cast<double>(extra) * mean2) / static_cast<double>(n);
    }
    out.sample_sizes[i] = n;
    out.total_samples += n;
    out.statistics[i] = stat;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < populations; ++i) {
    if (out.statistics[i] > out.statistics[best]) best = i;
  }
  out.selected_index = best;
  out.correct = best == instance.best_index;
  return out;
}

/// Slippage configuration with variances drawn from `prior` per replication.
struct InstanceSpec {
  double gap;
  VariancePrior prior;
};

struct PcsEstimate {
  Variant variant = Variant::dudewicz_dalal;
  double pcs = 0.0;
  double standard_error = 0.0;
  double mean_total_samples = 0.0;
  long long replications = 0;
  HConstant h;
};

/// Fraction of correct selections over independent replications.
/// Replication r uses rng.substream(r): variances from its substream 0,
/// observations from its substream 1.
inline PcsEstimate estimate_pcs(const ProcedureParams& params, const InstanceSpec& spec,
                                long long replications, const RandomStream& rng,
                                unsigned threads = 1) {
  params.validate();
  detail::require(replications >= 1, "estimate_pcs: replications must be >= 1");
  if (!(spec.gap > params.delta)) {
    throw DomainError("mean gap " + detail::format_double(spec.gap) +
                      " violates Theta(delta): every pairwise gap must exceed delta = " +
                      detail::format_double(params.delta));
  }
  const HConstant h = solve_h(params.h_spec());
  const auto populations = static_cast<std::size_t>(params.k + 1);

  struct Tally {
    long long correct = 0;
    long long samples = 0;
  };
  const auto blocks = parallel_blocks<Tally>(
      static_cast<std::size_t>(replications), threads,
      [&](std::size_t begin, std::size_t end) {
        Tally t;
        for (std::size_t r = begin; r < end; ++r) {
          const auto rep = rng.substream(r);
          auto vs = rep.substream(0);
          auto inst = make_slippage_instance(params, spec.gap, draw_variances(spec.prior, populations, vs));
          const auto outcome = run_procedure(inst, params, h, rep.substream(1));
          t.correct += outcome.correct ? 1 : 0;
          t.samples += outcome.total_samples;
        }
        return t;
      },
      256);
  Tally total;
  for (const auto& b : blocks) {
    total.correct += b.correct;
    total.samples += b.samples;
  }
  const auto prop = make_proportion(total.correct, replications);
  PcsEstimate out;
  out.variant = params.variant;
  out.pcs = prop.estimate;
  out.standard_error = prop.standard_error;
  out.mean_total_samples = static_cast<double>(total.samples) / static_cast<double>(replications);
  out.replications = replications;
  out.h = h;
  return out;
}

}  // namespace ranksel
