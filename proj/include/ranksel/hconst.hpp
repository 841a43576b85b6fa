#pragma once

/// Selection constants of the two-stage procedures.
///
/// With G, g the Student-t cdf and density on nu degrees of freedom, the
/// Dudewicz–Dalal constant solves
///
///     p = integral G(t + h)^k g(t) dt                       (dd_prob)
///
/// and the Rinott constant solves
///
///     p = [ integral G(t + h) g(t) dt ]^k                   (pairwise_prob)
///
/// Both left-hand sides are integrated with composite Gauss–Legendre panels
/// after the substitution t = sinh(s), which turns the polynomial tails of g
/// into exponential ones.  G^k is formed as exp(k log G) so that k in the
/// hundreds of thousands does not underflow, and the complements 1 - LHS are
/// integrated directly from the upper-tail function so that p^(1/k) close to 1
/// is resolved in relative terms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ranksel/distributions.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/parallel.hpp"
#include "ranksel/quadrature.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/roots.hpp"
#include "ranksel/schedule.hpp"
#include "ranksel/stats.hpp"

namespace ranksel {

enum class Variant { dudewicz_dalal, rinott };

inline std::string_view to_string(Variant v) {
  return v == Variant::dudewicz_dalal ? "dd" : "rinott";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "dd" || s == "DD") return Variant::dudewicz_dalal;
  if (s == "rinott" || s == "Rinott") return Variant::rinott;
  throw DomainError("unknown procedure variant '" + std::string(s) + "' (expected dd or rinott)");
}

struct HEquationSpec {
  long long k;  // competitors; k + 1 populations in total
  DegreesOfFreedom nu;
  Probability p;
  Variant variant;
};

struct HConstant {
  double value = 0.0;
  double residual = 0.0;  // |LHS(value) - p|
  double lo = 0.0;        // final bracket
  double hi = 0.0;
  int iterations = 0;     // bracket expansions + refinement steps
  long quadrature_nodes = 0;
};

/// Tail mass cut off by the quadrature range: t in [-T, T + |h|] with
/// T = t_quantile(1 - kTruncationMass).
inline constexpr double kTruncationMass = 1e-12;
inline constexpr double kResidualTolerance = 1e-8;

struct SelectionValue {
  double value = 0.0;
  long nodes = 0;
  bool converged = false;
};

/// Evaluates the selection integrals for a fixed nu.
class SelectionIntegrals {
 public:
  explicit SelectionIntegrals(DegreesOfFreedom nu)
      : law_(nu), truncation_(law_.quantile(1.0 - kTruncationMass)) {}

  [[nodiscard]] const StudentT& law() const { return law_; }
  [[nodiscard]] double truncation() const { return truncation_; }

  /// integral G(t + h)^k g(t) dt
  [[nodiscard]] SelectionValue probability(double h, double k) const {
    return integrate(h, k, [&](double x) { return std::exp(k * law_.log_cdf(x)); });
  }

  /// 1 - integral G(t + h)^k g(t) dt, integrated as integral (1 - G^k) g.
  [[nodiscard]] SelectionValue complement(double h, double k) const {
    if (k == 1.0) return integrate(h, k, [&](double x) { return law_.sf(x); });
    return integrate(h, k, [&](double x) { return -std::expm1(k * law_.log_cdf(x)); });
  }

 private:
  // The integrand has two features: the density peak at t = 0 and the step
  // of G^k(t + h) around its median t = m_k - h.  For large |h| the step is
  // narrow in s = asinh(t), so both are made panel boundaries.
  template <class F>
  SelectionValue integrate(double h, double k, F&& f) const {
    const double t_lo = -truncation_;
    const double t_hi = truncation_ + std::fabs(h);
    auto integrand = [&](double s) {
      const double t = std::sinh(s);
      return f(t + h) * law_.pdf(t) * std::cosh(s);
    };
    const double step = law_.upper_quantile(-std::expm1(-std::numbers::ln2 / k)) - h;
    std::vector<double> cuts{std::asinh(t_lo), std::asinh(t_hi)};
    for (double t : {0.0, step}) {
      if (t > t_lo && t < t_hi) cuts.push_back(std::asinh(t));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-15;
    SelectionValue out{0.0, 0, true};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const auto q = integrate_panels(integrand, cuts[i], cuts[i + 1], opt);
      out.value += q.value;
      out.nodes += q.nodes;
      out.converged = out.converged && q.converged;
    }
    // f is monotone and nearly flat beyond the cut; charge each tail its edge value.
    out.value += f(t_lo + h) * law_.cdf(t_lo) + f(t_hi + h) * law_.sf(t_hi);
    return out;
  }

  StudentT law_;
  double truncation_;
};

/// P(T2 - T1 <= h) for independent t_nu variables.
inline double pairwise_prob(double h, DegreesOfFreedom nu) {
  return SelectionIntegrals(nu).probability(h, 1.0).value;
}

/// P(T2 - T1 > h), accurate when tiny.
inline double pairwise_complement(double h, DegreesOfFreedom nu) {
  return SelectionIntegrals(nu).complement(h, 1.0).value;
}

/// P(max_{i<=k} T_i - T_0 <= h) for k + 1 independent t_nu variables.
inline double dd_prob(double h, long long k, DegreesOfFreedom nu) {
  detail::require(k >= 1, "dd_prob: k must be >= 1");
  return SelectionIntegrals(nu).probability(h, static_cast<double>(k)).value;
}

namespace detail {

inline void validate(const HEquationSpec& spec) {
  require(spec.k >= 1, "h equation: k must be >= 1, got " + std::to_string(spec.k));
}

/// Left-hand side of the variant's equation in p-space.
struct HEquation {
  HEquationSpec spec;
  SelectionIntegrals integrals;
  long nodes = 0;

  explicit HEquation(const HEquationSpec& s) : spec(s), integrals(s.nu) {}

  double lhs(double h) {
    const double k = static_cast<double>(spec.k);
    if (spec.variant == Variant::dudewicz_dalal) {
      const auto v = integrals.probability(h, k);
      nodes += v.nodes;
      return v.value;
    }
    // [1 - c]^k with c = P(T2 - T1 > h)
    const auto c = integrals.complement(h, 1.0);
    nodes += c.nodes;
    return std::exp(k * std::log1p(-c.value));
  }
};

}  // namespace detail

/// Left-hand side of the spec's defining equation evaluated at h.
inline double h_equation_lhs(const HEquationSpec& spec, double h) {
  detail::validate(spec);
  detail::HEquation eq(spec);
  return eq.lhs(h);
}

/// Solves the variant's equation for h.  Bracketing starts at [0, 1] and grows
/// geometrically (towards negative h when the left side already exceeds p at
/// zero); Brent's method then refines to machine-level h resolution.
inline HConstant solve_h(const HEquationSpec& spec) {
  detail::validate(spec);
  detail::HEquation eq(spec);
  const double p = spec.p.value();
  auto f = [&](double h) { return eq.lhs(h) - p; };

  Bracket br;
  try {
    br = bracket_increasing(f, 0.0, 1.0, 80);
  } catch (const SolverError&) {
    throw SolverError("solve_h: bracket expansion failed for k=" + std::to_string(spec.k) +
                      " nu=" + std::to_string(spec.nu.value()));
  }
  RootTolerances tol;
  tol.x_abs = 1e-13;
  tol.x_rel = 1e-14;
  tol.f_abs = 1e-15;
  tol.max_iterations = 300;
  const auto root = brent_root(f, br.lo, br.hi, br.f_lo, br.f_hi, tol);

  HConstant out;
  out.value = root.x;
  out.residual = std::fabs(root.fx);
  out.lo = std::min(root.lo, root.x);
  out.hi = std::max(root.hi, root.x);
  out.iterations = br.expansions + root.iterations;
  out.quadrature_nodes = eq.nodes;
  if (!(out.residual < kResidualTolerance)) {
    throw SolverError("solve_h: residual " + std::to_string(out.residual) +
                      " above tolerance for k=" + std::to_string(spec.k));
  }
  return out;
}

/// Monte Carlo estimate of the spec's left-hand side at h.
///   DD:     event max_{i=1..k} T_i - T_0 <= h
///   Rinott: event T_{i,2} - T_{i,1} <= h for k independent pairs
/// Replication r uses rng.substream(r).
inline ProportionEstimate mc_oracle(const HEquationSpec& spec, double h, long long replications,
                                    const RandomStream& rng, unsigned threads = 1) {
  detail::validate(spec);
  detail::require(replications >= 1, "mc_oracle: replications must be >= 1");
  const auto nu = spec.nu;
  const long long k = spec.k;
  const auto hits = parallel_blocks<long long>(
      static_cast<std::size_t>(replications), threads, [&](std::size_t begin, std::size_t end) {
        long long count = 0;
        for (std::size_t r = begin; r < end; ++r) {
          auto s = rng.substream(r);
          bool ok = true;
          if (spec.variant == Variant::dudewicz_dalal) {
            const double limit = sample_t(nu, s) + h;
            for (long long i = 0; i < k && ok; ++i) ok = sample_t(nu, s) <= limit;
          } else {
            for (long long i = 0; i < k && ok; ++i) {
              const double first = sample_t(nu, s);
              ok = sample_t(nu, s) - first <= h;
            }
          }
          count += ok ? 1 : 0;
        }
        return count;
      });
  long long total = 0;
  for (auto c : hits) total += c;
  return make_proportion(total, replications);
}

struct HTableRow {
  long long k = 0;
  int nu = 0;
  double p = 0.0;
  HConstant dd;
  HConstant rinott;
  double ratio = 0.0;  // rinott / dd; 1 when both constants vanish
};

inline double h_ratio(const HConstant& dd, const HConstant& rinott) {
  constexpr double kZero = 1e-9;
  if (std::fabs(dd.value) < kZero && std::fabs(rinott.value) < kZero) return 1.0;
  return rinott.value / dd.value;
}

/// Both constants for each k, with nu taken from `nu_schedule`.
inline std::vector<HTableRow> h_table(const std::vector<long long>& ks, const Schedule& nu_schedule,
                                      Probability p, unsigned threads = 1) {
  detail::require(!ks.empty(), "h_table: ks must be nonempty");
  for (std::size_t i = 1; i < ks.size(); ++i) {
    detail::require(ks[i] > ks[i - 1], "h_table: ks must be strictly ascending");
  }
  return parallel_map<HTableRow>(ks.size(), threads, [&](std::size_t i) {
    const long long k = ks[i];
    const auto nu_value = nu_schedule(k);
    detail::require(nu_value >= 1 && nu_value <= 1'000'000,
                    "h_table: schedule gives invalid nu at k=" + std::to_string(k));
    const DegreesOfFreedom nu(static_cast<int>(nu_value));
    HTableRow row;
    row.k = k;
    row.nu = nu.value();
    row.p = p.value();
    try {
      row.dd = solve_h({k, nu, p, Variant::dudewicz_dalal});
      row.rinott = solve_h({k, nu, p, Variant::rinott});
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " [h_table row k=" + std::to_string(k) + "]");
    }
    row.ratio = h_ratio(row.dd, row.rinott);
    return row;
  });
}

}  // namespace ranksel
