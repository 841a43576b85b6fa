#pragma once

// Subcommands of the `ranksel` tool.  Kept in a header so tests can drive the
// whole front end in-process through run().

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "run_config.hpp"

namespace ranksel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

inline constexpr std::uint64_t kDefaultSeed = 1;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// ---------------------------------------------------------------------------
// Computation

inline Table run_hconst(const HconstConfig& c, unsigned threads) {
  const auto rows = h_table(c.ks, c.nu_schedule, Probability(c.p), threads);
  Table t{{"k", "nu", "p", "h_dd", "h_rinott", "ratio", "residual_dd", "residual_rinott"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.k, static_cast<long long>(r.nu), r.p, r.dd.value, r.rinott.value, r.ratio,
                      r.dd.residual, r.rinott.residual});
  }
  return t;
}

inline Table run_pcs(const PcsConfig& c, const RandomStream& rng, unsigned threads) {
  std::vector<Variant> variants;
  if (c.variants != VariantChoice::rinott) variants.push_back(Variant::dudewicz_dalal);
  if (c.variants != VariantChoice::dudewicz_dalal) variants.push_back(Variant::rinott);
  ranksel::detail::require(!c.ps.empty(), "pcs: at least one p is required");
  Table t{{"variant", "k", "n0", "p", "delta", "gap", "h", "pcs", "standard_error",
           "mean_total_samples", "replications"},
          {}};
  for (std::size_t i = 0; i < c.ps.size(); ++i) {
    for (const auto v : variants) {
      ProcedureParams params{Probability(c.ps[i]), c.delta, c.k, c.n0, v, c.path};
      // every (p, variant) row sees the same replication streams
      const auto est = estimate_pcs(params, {c.gap, c.prior}, c.replications, rng, threads);
      t.rows.push_back({std::string(to_string(v)), c.k, static_cast<long long>(c.n0), c.ps[i],
                        c.delta, c.gap, est.h.value, est.pcs, est.standard_error,
                        est.mean_total_samples, est.replications});
    }
  }
  return t;
}

inline Table run_efficiency(const EfficiencyConfig& c, const RandomStream& rng, unsigned threads) {
  const auto report = efficiency_curve(c.ks, c.n0_schedule, Probability(c.p), c.delta, c.prior,
                                       c.replications, rng, threads);
  Table t{{"k", "n0", "nu", "h_dd", "h_rinott", "h_ratio", "h_ratio_sq", "alpha_dd", "alpha_dd_se",
           "alpha_rinott", "alpha_rinott_se", "alpha_dd_cv", "alpha_dd_cv_se", "alpha_rinott_cv",
           "alpha_rinott_cv_se", "alpha_ratio", "sample_ratio", "sample_ratio_se",
           "theoretical_eta", "lhat_dd", "lhat_rinott", "maxmix_dd", "maxmix_rinott"},
          {}};
  for (const auto& r : report.rows) {
    t.rows.push_back({r.k, static_cast<long long>(r.n0), static_cast<long long>(r.nu), r.h_dd.value,
                      r.h_rinott.value, r.h_ratio, r.h_ratio_sq, r.alpha_dd, r.alpha_dd_se,
                      r.alpha_rinott, r.alpha_rinott_se, r.alpha_dd_cv, r.alpha_dd_cv_se,
                      r.alpha_rinott_cv, r.alpha_rinott_cv_se, r.alpha_ratio, r.sample_ratio,
                      r.sample_ratio_se, report.theoretical_eta, r.lhat_dd, r.lhat_rinott,
                      r.maxmix_dd, r.maxmix_rinott});
  }
  return t;
}

inline Table run_extremes(const ExtremesConfig& c, const RandomStream& rng, unsigned threads) {
  TriangularArraySpec spec{c.ks, c.nu_schedule, c.statistic, c.replications, c.hill_fraction};
  const auto report = fit_extremes(spec, rng, threads);
  Table t{{"k", "nu", "statistic", "median", "q25", "q75", "iqr", "gumbel_location", "gumbel_scale",
           "gumbel_ad", "frechet_scale", "frechet_shape", "frechet_ad", "hill_tail_index",
           "nonpositive"},
          {}};
  for (const auto& r : report.rows) {
    t.rows.push_back({r.k, static_cast<long long>(r.nu), std::string(to_string(report.statistic)),
                      r.median, r.q25, r.q75, r.iqr, r.gumbel.location, r.gumbel.scale, r.gumbel_ad,
                      r.frechet.scale, r.frechet.shape, r.frechet_ad, r.hill_tail_index,
                      r.nonpositive});
  }
  return t;
}

/// Streams are keyed by (seed, command index) so commands never share draws.
inline Table execute(const RunConfig& rc, unsigned threads) {
  const RandomStream rng(rc.seed, {static_cast<std::uint64_t>(rc.command.index())});
  return std::visit(
      [&](const auto& c) -> Table {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HconstConfig>) return run_hconst(c, threads);
        if constexpr (std::is_same_v<T, PcsConfig>) return run_pcs(c, rng, threads);
        if constexpr (std::is_same_v<T, EfficiencyConfig>) return run_efficiency(c, rng, threads);
        if constexpr (std::is_same_v<T, ExtremesConfig>) return run_extremes(c, rng, threads);
      },
      rc.command);
}

// ---------------------------------------------------------------------------
// Output

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string csv_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return ranksel::detail::format_double(*d);
  return std::get<std::string>(c);
}

inline json json_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  return std::get<std::string>(c);
}

/// CSV: `#` header lines (tool, config, timestamp), then the column row.
/// JSONL: one header object {"config", "timestamp"}, then one flat object per row.
inline void write_table(std::ostream& os, const RunConfig& rc, const Table& t,
                        const std::string& timestamp) {
  const json config = to_json(rc);
  if (rc.format == OutputFormat::csv) {
    os << "# ranksel " << command_name(rc.command) << '\n';
    os << "# config: " << config.dump() << '\n';
    os << "# timestamp: " << timestamp << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << '\n';
    }
  } else {
    os << json{{"config", config}, {"timestamp", timestamp}}.dump() << '\n';
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
      os << obj.dump() << '\n';
    }
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

template <class T>
void override_with(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

inline void require_set(bool present, const std::string& what) {
  if (!present) throw DomainError("missing required option " + what);
}

inline std::optional<Schedule> schedule_from(const std::optional<int>& fixed,
                                             const std::optional<std::string>& text,
                                             const char* fixed_flag, const char* schedule_flag) {
  if (fixed && text) {
    throw DomainError(std::string(fixed_flag) + " and " + schedule_flag + " are mutually exclusive");
  }
  if (fixed) return Schedule::constant(*fixed);
  if (text) return Schedule::parse(*text);
  return std::nullopt;
}

inline std::optional<std::vector<long long>> ks_from(const std::optional<long long>& k,
                                                     const std::vector<long long>& ks) {
  if (k && !ks.empty()) throw DomainError("--k and --ks are mutually exclusive");
  if (k) return std::vector<long long>{*k};
  if (!ks.empty()) return ks;
  return std::nullopt;
}

}  // namespace detail

/// Runs the tool; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage ranking-and-selection constants, simulations and diagnostics", "ranksel"};
  app.require_subcommand(0, 1);

  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> output_path, format_text, config_path;
  app.add_option("--seed", seed, "Master seed (falls back to the config, then RANKSEL_SEED)");
  app.add_option("--threads", threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  app.add_option("--output,-o", output_path, "Output file (default: stdout)");
  app.add_option("--format", format_text, "csv or jsonl (default csv)");
  app.add_option("--config", config_path, "Run config: JSON or an output file of this tool");

  // hconst
  auto* hconst = app.add_subcommand("hconst", "Solve both h-equations over a k grid");
  std::optional<long long> hk;
  std::vector<long long> hks;
  std::optional<int> hnu;
  std::optional<std::string> hnu_schedule;
  std::optional<double> hp;
  hconst->add_option("--k", hk, "Single k");
  hconst->add_option("--ks", hks, "Comma-separated ascending k values")->delimiter(',');
  hconst->add_option("--nu", hnu, "Fixed degrees of freedom");
  hconst->add_option("--nu-schedule", hnu_schedule, "nu(k): constant:c, identity[:o], log[:o], power:e[:o]");
  hconst->add_option("--p", hp, "Target probability");

  // pcs
  auto* pcs = app.add_subcommand("pcs", "Estimate the probability of correct selection");
  std::optional<long long> pk, preps;
  std::optional<int> pnu, pn0;
  std::vector<double> pps;
  std::optional<double> pdelta, pgap;
  std::optional<std::string> pprior, pvariant, ppath;
  pcs->add_option("--k", pk, "k (k + 1 populations)");
  pcs->add_option("--nu", pnu, "Degrees of freedom (N0 = nu + 1)");
  pcs->add_option("--n0", pn0, "First-stage size N0");
  pcs->add_option("--p", pps, "Comma-separated target probabilities")->delimiter(',');
  pcs->add_option("--delta", pdelta, "Indifference parameter (default 1)");
  pcs->add_option("--gap", pgap, "Slippage mean gap (default 1.01 delta)");
  pcs->add_option("--prior", pprior, "Variance prior: fixed:v, inverse-gamma:a:b, lognormal:mu:s");
  pcs->add_option("--reps", preps, "Replications (default 10000)");
  pcs->add_option("--variant", pvariant, "dd, rinott or both (default both)");
  pcs->add_option("--path", ppath, "summary or observations (default summary)");

  // efficiency
  auto* eff = app.add_subcommand("efficiency", "Expected sample sizes and their ratio over k");
  std::vector<long long> eks;
  std::optional<int> enu;
  std::optional<std::string> en0_schedule, eprior;
  std::optional<double> ep, edelta;
  std::optional<long long> ereps;
  eff->add_option("--ks", eks, "Comma-separated ascending k values")->delimiter(',');
  eff->add_option("--nu", enu, "Fixed degrees of freedom (N0 = nu + 1)");
  eff->add_option("--n0-schedule", en0_schedule, "N0(k): constant:c, log[:o], power:e[:o], identity[:o]");
  eff->add_option("--p", ep, "Target probability");
  eff->add_option("--delta", edelta, "Indifference parameter (default 1)");
  eff->add_option("--prior", eprior, "Variance prior (default inverse-gamma:3:4)");
  eff->add_option("--reps", ereps, "Replications per k (default 100000)");

  // extremes
  auto* ext = app.add_subcommand("extremes", "Extreme-value diagnostics for t maxima");
  std::vector<long long> xks;
  std::optional<int> xnu;
  std::optional<std::string> xnu_schedule, xstatistic;
  std::optional<long long> xreps;
  std::optional<double> xhill;
  ext->add_option("--ks", xks, "Comma-separated ascending k values")->delimiter(',');
  ext->add_option("--nu", xnu, "Fixed degrees of freedom");
  ext->add_option("--nu-schedule", xnu_schedule, "nu(k) schedule");
  ext->add_option("--statistic", xstatistic, "max-t or max-t-sum (default max-t)");
  ext->add_option("--reps", xreps, "Replications per k (default 1000, minimum 100)");
  ext->add_option("--hill-fraction", xhill, "Upper fraction used by the Hill estimator (default 0.05)");

  for (auto* sub : {hconst, pcs, eff, ext}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ranksel: " << e.what() << "\n" << "run 'ranksel --help' for usage\n";
    return kExitUsage;
  }

  try {
    RunConfig rc;
    std::optional<RunConfig> loaded;
    if (config_path) loaded = parse_run_config_text(read_file(*config_path));

    const char* chosen = nullptr;
    for (auto* sub : {hconst, pcs, eff, ext}) {
      if (sub->parsed()) chosen = sub->get_name().c_str();
    }
    if (!chosen && !loaded) throw DomainError("a subcommand or --config is required");
    if (chosen && loaded && command_name(loaded->command) != chosen) {
      throw DomainError("--config holds a '" + command_name(loaded->command) + "' run, not '" +
                        chosen + "'");
    }
    const std::string name = chosen ? chosen : command_name(loaded->command);

    if (name == "hconst") {
      HconstConfig c = loaded ? std::get<HconstConfig>(loaded->command) : HconstConfig{};
      const auto ks = detail::ks_from(hk, hks);
      const auto sched = detail::schedule_from(hnu, hnu_schedule, "--nu", "--nu-schedule");
      if (!loaded) {
        detail::require_set(ks.has_value(), "--k or --ks");
        detail::require_set(sched.has_value(), "--nu or --nu-schedule");
        detail::require_set(hp.has_value(), "--p");
      }
      detail::override_with(c.ks, ks);
      detail::override_with(c.nu_schedule, sched);
      detail::override_with(c.p, hp);
      rc.command = c;
    } else if (name == "pcs") {
      PcsConfig c = loaded ? std::get<PcsConfig>(loaded->command) : PcsConfig{};
      if (pnu && pn0) throw DomainError("--nu and --n0 are mutually exclusive");
      std::optional<int> n0 = pn0;
      if (pnu) n0 = *pnu + 1;
      if (!loaded) {
        detail::require_set(pk.has_value(), "--k");
        detail::require_set(n0.has_value(), "--nu or --n0");
        detail::require_set(!pps.empty(), "--p");
      }
      detail::override_with(c.k, pk);
      detail::override_with(c.n0, n0);
      if (!pps.empty()) c.ps = pps;
      detail::override_with(c.delta, pdelta);
      if (pgap) {
        c.gap = *pgap;
      } else if (!loaded || pdelta) {
        c.gap = 1.01 * c.delta;
      }
      if (pprior) c.prior = VariancePrior::parse(*pprior);
      detail::override_with(c.replications, preps);
      if (pvariant) c.variants = parse_variant_choice(*pvariant);
      if (ppath) c.path = parse_sampling_path(*ppath);
      rc.command = c;
    } else if (name == "efficiency") {
      EfficiencyConfig c = loaded ? std::get<EfficiencyConfig>(loaded->command) : EfficiencyConfig{};
      std::optional<int> n0_fixed;
      if (enu) n0_fixed = *enu + 1;
      const auto sched = detail::schedule_from(n0_fixed, en0_schedule, "--nu", "--n0-schedule");
      if (!loaded) {
        detail::require_set(!eks.empty(), "--ks");
        detail::require_set(sched.has_value(), "--nu or --n0-schedule");
        detail::require_set(ep.has_value(), "--p");
      }
      if (!eks.empty()) c.ks = eks;
      detail::override_with(c.n0_schedule, sched);
      detail::override_with(c.p, ep);
      detail::override_with(c.delta, edelta);
      if (eprior) c.prior = VariancePrior::parse(*eprior);
      detail::override_with(c.replications, ereps);
      rc.command = c;
    } else {
      ExtremesConfig c = loaded ? std::get<ExtremesConfig>(loaded->command) : ExtremesConfig{};
      const auto sched = detail::schedule_from(xnu, xnu_schedule, "--nu", "--nu-schedule");
      if (!loaded) {
        detail::require_set(!xks.empty(), "--ks");
        detail::require_set(sched.has_value(), "--nu or --nu-schedule");
      }
      if (!xks.empty()) c.ks = xks;
      detail::override_with(c.nu_schedule, sched);
      if (xstatistic) c.statistic = parse_max_statistic(*xstatistic);
      detail::override_with(c.replications, xreps);
      detail::override_with(c.hill_fraction, xhill);
      rc.command = c;
    }

    if (seed) {
      rc.seed = *seed;
    } else if (loaded) {
      rc.seed = loaded->seed;
    } else if (const char* env = std::getenv("RANKSEL_SEED"); env && *env) {
      rc.seed = static_cast<std::uint64_t>(ranksel::detail::parse_integer(env, "RANKSEL_SEED"));
    } else {
      rc.seed = kDefaultSeed;
    }
    if (format_text) {
      rc.format = parse_output_format(*format_text);
    } else if (loaded) {
      rc.format = loaded->format;
    }

    const Table table = execute(rc, threads);
    const std::string stamp = utc_timestamp();
    if (output_path) {
      std::ofstream file(*output_path, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open '" + *output_path + "' for writing");
      write_table(file, rc, table, stamp);
      file.close();
      if (!file) throw IoError("failed writing '" + *output_path + "'");
    } else {
      write_table(out, rc, table, stamp);
      out.flush();
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "ranksel: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SolverError& e) {
    err << "ranksel: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "ranksel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "ranksel: malformed config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "ranksel: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ranksel::cli
