#pragma once

// Serializable run configuration for the command-line front end.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ranksel/ranksel.hpp"

namespace ranksel::cli {

using json = nlohmann::ordered_json;

enum class OutputFormat { csv, jsonl };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "jsonl"; }

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "jsonl") return OutputFormat::jsonl;
  throw DomainError("unknown output format '" + std::string(s) + "' (expected csv or jsonl)");
}

/// Variants a pcs run covers.
enum class VariantChoice { dudewicz_dalal, rinott, both };

inline std::string_view to_string(VariantChoice v) {
  switch (v) {
    case VariantChoice::dudewicz_dalal:
      return "dd";
    case VariantChoice::rinott:
      return "rinott";
    case VariantChoice::both:
      break;
  }
  return "both";
}

inline VariantChoice parse_variant_choice(std::string_view s) {
  if (s == "both") return VariantChoice::both;
  return parse_variant(s) == Variant::dudewicz_dalal ? VariantChoice::dudewicz_dalal
                                                     : VariantChoice::rinott;
}

struct HconstConfig {
  std::vector<long long> ks;
  Schedule nu_schedule = Schedule::constant(1);
  double p = 0.0;
};

struct PcsConfig {
  long long k = 0;
  int n0 = 0;
  std::vector<double> ps;
  double delta = 1.0;
  double gap = 0.0;  // absolute mean gap; must exceed delta
  VariancePrior prior = VariancePrior::fixed(1.0);
  long long replications = 10'000;
  VariantChoice variants = VariantChoice::both;
  SamplingPath path = SamplingPath::summary;
};

struct EfficiencyConfig {
  std::vector<long long> ks;
  Schedule n0_schedule = Schedule::constant(2);
  double p = 0.0;
  double delta = 1.0;
  VariancePrior prior = VariancePrior::inverse_gamma(3.0, 4.0);
  long long replications = 100'000;
};

struct ExtremesConfig {
  std::vector<long long> ks;
  Schedule nu_schedule = Schedule::constant(3);
  MaxStatistic statistic = MaxStatistic::max_of_t;
  long long replications = 1000;
  double hill_fraction = 0.05;
};

using CommandConfig = std::variant<HconstConfig, PcsConfig, EfficiencyConfig, ExtremesConfig>;

/// Everything that determines a run's output rows.  The output path and the
/// thread count are deliberately absent: neither changes the result.
struct RunConfig {
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::csv;
  CommandConfig command;
};

inline std::string command_name(const CommandConfig& c) {
  static constexpr const char* names[] = {"hconst", "pcs", "efficiency", "extremes"};
  return names[c.index()];
}

inline json to_json(const RunConfig& rc) {
  json params;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HconstConfig>) {
          params = {{"ks", c.ks}, {"nu_schedule", c.nu_schedule.to_string()}, {"p", c.p}};
        } else if constexpr (std::is_same_v<T, PcsConfig>) {
          params = {{"k", c.k},
                    {"n0", c.n0},
                    {"ps", c.ps},
                    {"delta", c.delta},
                    {"gap", c.gap},
                    {"prior", c.prior.to_string()},
                    {"replications", c.replications},
                    {"variants", to_string(c.variants)},
                    {"path", to_string(c.path)}};
        } else if constexpr (std::is_same_v<T, EfficiencyConfig>) {
          params = {{"ks", c.ks},
                    {"n0_schedule", c.n0_schedule.to_string()},
                    {"p", c.p},
                    {"delta", c.delta},
                    {"prior", c.prior.to_string()},
                    {"replications", c.replications}};
        } else {
          params = {{"ks", c.ks},
                    {"nu_schedule", c.nu_schedule.to_string()},
                    {"statistic", to_string(c.statistic)},
                    {"replications", c.replications},
                    {"hill_fraction", c.hill_fraction}};
        }
      },
      rc.command);
  return {{"command", command_name(rc.command)},
          {"seed", rc.seed},
          {"format", to_string(rc.format)},
          {"params", params}};
}

namespace detail {

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw DomainError(std::string("config is missing '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("config field '") + name + "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig run_config_from_json(const json& j) {
  using detail::field;
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  RunConfig rc;
  rc.seed = field<std::uint64_t>(j, "seed");
  rc.format = parse_output_format(field<std::string>(j, "format"));
  const auto name = field<std::string>(j, "command");
  const json params = field<json>(j, "params");
  if (name == "hconst") {
    HconstConfig c;
    c.ks = field<std::vector<long long>>(params, "ks");
    c.nu_schedule = Schedule::parse(field<std::string>(params, "nu_schedule"));
    c.p = field<double>(params, "p");
    rc.command = c;
  } else if (name == "pcs") {
    PcsConfig c;
    c.k = field<long long>(params, "k");
    c.n0 = field<int>(params, "n0");
    c.ps = field<std::vector<double>>(params, "ps");
    c.delta = field<double>(params, "delta");
    c.gap = field<double>(params, "gap");
    c.prior = VariancePrior::parse(field<std::string>(params, "prior"));
    c.replications = field<long long>(params, "replications");
    c.variants = parse_variant_choice(field<std::string>(params, "variants"));
    c.path = parse_sampling_path(field<std::string>(params, "path"));
    rc.command = c;
  } else if (name == "efficiency") {
    EfficiencyConfig c;
    c.ks = field<std::vector<long long>>(params, "ks");
    c.n0_schedule = Schedule::parse(field<std::string>(params, "n0_schedule"));
    c.p = field<double>(params, "p");
    c.delta = field<double>(params, "delta");
    c.prior = VariancePrior::parse(field<std::string>(params, "prior"));
    c.replications = field<long long>(params, "replications");
    rc.command = c;
  } else if (name == "extremes") {
    ExtremesConfig c;
    c.ks = field<std::vector<long long>>(params, "ks");
    c.nu_schedule = Schedule::parse(field<std::string>(params, "nu_schedule"));
    c.statistic = parse_max_statistic(field<std::string>(params, "statistic"));
    c.replications = field<long long>(params, "replications");
    c.hill_fraction = field<double>(params, "hill_fraction");
    rc.command = c;
  } else {
    throw DomainError("unknown command '" + name + "' in config");
  }
  return rc;
}

/// Reads a RunConfig from either a bare JSON config or an output file written
/// by this tool (CSV `# config:` line or JSONL header object).
inline RunConfig parse_run_config_text(std::string_view text) {
  constexpr std::string_view kCsvTag = "# config: ";
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    if (line.starts_with(kCsvTag)) {
      return run_config_from_json(json::parse(line.substr(kCsvTag.size())));
    }
    if (!line.starts_with("#")) break;
    pos = end + 1;
  }
  json j;
  try {
    const auto first_end = std::min(text.find('\n'), text.size());
    const json first = json::parse(text.substr(0, first_end), nullptr, false);
    if (first.is_object() && first.contains("config")) return run_config_from_json(first.at("config"));
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace ranksel::cli
