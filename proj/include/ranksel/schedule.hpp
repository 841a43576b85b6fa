#pragma once

// Integer-valued schedules k -> value, used for N0(k) and nu(k).

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ranksel/errors.hpp"

namespace ranksel {

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view s, std::string_view what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// value(k) for one of:
///   constant:c          c
///   identity:o          k + o
///   log:o               ceil(ln k) + o
///   power:e:o           ceil(k^e) + o
class Schedule {
 public:
  enum class Kind { constant, identity, logarithmic, power };

  static Schedule constant(int value) { return Schedule(Kind::constant, 0.0, value); }
  static Schedule identity(int offset = 0) { return Schedule(Kind::identity, 0.0, offset); }
  static Schedule logarithmic(int offset = 2) { return Schedule(Kind::logarithmic, 0.0, offset); }
  static Schedule power(double exponent, int offset = 2) {
    detail::require(exponent > 0.0 && std::isfinite(exponent), "power schedule exponent must be positive");
    return Schedule(Kind::power, exponent, offset);
  }

  [[nodiscard]] Kind kind() const { return kind_; }

  [[nodiscard]] long long operator()(long long k) const {
    detail::require(k >= 1, "schedule evaluated at k < 1");
    switch (kind_) {
      case Kind::constant:
        return offset_;
      case Kind::identity:
        return k + offset_;
      case Kind::logarithmic:
        return static_cast<long long>(std::ceil(std::log(static_cast<double>(k)))) + offset_;
      case Kind::power:
        return static_cast<long long>(std::ceil(std::pow(static_cast<double>(k), exponent_))) +
               offset_;
    }
    return offset_;
  }

  [[nodiscard]] std::string to_string() const {
    switch (kind_) {
      case Kind::constant:
        return "constant:" + std::to_string(offset_);
      case Kind::identity:
        return "identity:" + std::to_string(offset_);
      case Kind::logarithmic:
        return "log:" + std::to_string(offset_);
      case Kind::power:
        return "power:" + detail::format_double(exponent_) + ":" + std::to_string(offset_);
    }
    return {};
  }

  /// Inverse of to_string; offsets may be omitted (identity:0, log:2, power:e:2).
  static Schedule parse(std::string_view text) {
    const auto parts = detail::split(text, ':');
    const auto name = parts[0];
    auto offset_at = [&](std::size_t i, int fallback) {
      return parts.size() > i ? static_cast<int>(detail::parse_integer(parts[i], "schedule offset"))
                              : fallback;
    };
    if (name == "constant" && parts.size() == 2) return constant(offset_at(1, 0));
    if (name == "identity" && parts.size() <= 2) return identity(offset_at(1, 0));
    if (name == "log" && parts.size() <= 2) return logarithmic(offset_at(1, 2));
    if (name == "power" && (parts.size() == 2 || parts.size() == 3)) {
      return power(detail::parse_double(parts[1], "power exponent"), offset_at(2, 2));
    }
    throw DomainError("unknown schedule '" + std::string(text) +
                      "' (expected constant:c, identity[:o], log[:o] or power:e[:o])");
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  Schedule(Kind kind, double exponent, int offset)
      : kind_(kind), exponent_(exponent), offset_(offset) {}

  Kind kind_;
  double exponent_;
  int offset_;
};

}  // namespace ranksel
