#pragma once

// Laws for the population variances sigma_i^2 (drawn i.i.d.).

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "ranksel/distributions.hpp"
#include "ranksel/errors.hpp"
#include "ranksel/rng.hpp"
#include "ranksel/schedule.hpp"

namespace ranksel {

class VariancePrior {
 public:
  enum class Kind { fixed, inverse_gamma, lognormal };

  static VariancePrior fixed(double variance) {
    detail::require(variance > 0.0 && std::isfinite(variance), "fixed prior: variance must be positive");
    return VariancePrior(Kind::fixed, variance, 0.0);
  }

  /// sigma^2 = scale / Gamma(shape, 1).  shape > 2 keeps E[sigma^4] finite.
  static VariancePrior inverse_gamma(double shape, double scale) {
    detail::require(shape > 2.0, "inverse-gamma prior: shape must exceed 2");
    detail::require(scale > 0.0 && std::isfinite(scale), "inverse-gamma prior: scale must be positive");
    return VariancePrior(Kind::inverse_gamma, shape, scale);
  }

  /// sigma^2 = exp(mu + sigma Z).
  static VariancePrior lognormal(double mu, double sigma) {
    detail::require(std::isfinite(mu), "lognormal prior: mu must be finite");
    detail::require(sigma > 0.0 && std::isfinite(sigma), "lognormal prior: sigma must be positive");
    return VariancePrior(Kind::lognormal, mu, sigma);
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double first() const { return a_; }
  [[nodiscard]] double second() const { return b_; }

  [[nodiscard]] double draw(RandomStream& rng) const {
    switch (kind_) {
      case Kind::fixed:
        return a_;
      case Kind::inverse_gamma:
        return b_ / sample_gamma(a_, rng);
      case Kind::lognormal:
        return std::exp(a_ + b_ * rng.standard_normal());
    }
    return a_;
  }

  [[nodiscard]] double mean() const {
    switch (kind_) {
      case Kind::fixed:
        return a_;
      case Kind::inverse_gamma:
        return b_ / (a_ - 1.0);
      case Kind::lognormal:
        return std::exp(a_ + 0.5 * b_ * b_);
    }
    return a_;
  }

  [[nodiscard]] double second_moment() const {
    switch (kind_) {
      case Kind::fixed:
        return a_ * a_;
      case Kind::inverse_gamma:
        return b_ * b_ / ((a_ - 1.0) * (a_ - 2.0));
      case Kind::lognormal:
        return std::exp(2.0 * a_ + 2.0 * b_ * b_);
    }
    return a_ * a_;
  }

  /// Density of log(sigma^2) at y; not defined for the fixed prior.
  [[nodiscard]] double log_scale_density(double y) const {
    switch (kind_) {
      case Kind::inverse_gamma: {
        // x = e^y, f(x) x = scale^shape / Gamma(shape) x^-shape e^(-scale/x)
        const double log_f = a_ * std::log(b_) - std::lgamma(a_) - a_ * y - b_ * std::exp(-y);
        return std::exp(log_f);
      }
      case Kind::lognormal: {
        const double z = (y - a_) / b_;
        return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * std::numbers::pi));
      }
      case Kind::fixed:
        break;
    }
    throw DomainError("fixed prior has no density");
  }

  /// Interval of log(sigma^2) holding all but a negligible fraction of mass.
  [[nodiscard]] std::pair<double, double> log_scale_support() const {
    switch (kind_) {
      case Kind::inverse_gamma:
        // log sigma^2 = log scale - log G with G ~ Gamma(shape)
        return {std::log(b_) - std::log(a_ + 60.0 * std::sqrt(a_) + 200.0),
                std::log(b_) + 60.0 / a_ + 5.0};
      case Kind::lognormal:
        return {a_ - 40.0 * b_, a_ + 40.0 * b_};
      case Kind::fixed:
        break;
    }
    return {std::log(a_), std::log(a_)};
  }

  [[nodiscard]] std::string to_string() const {
    switch (kind_) {
      case Kind::fixed:
        return "fixed:" + detail::format_double(a_);
      case Kind::inverse_gamma:
        return "inverse-gamma:" + detail::format_double(a_) + ":" + detail::format_double(b_);
      case Kind::lognormal:
        return "lognormal:" + detail::format_double(a_) + ":" + detail::format_double(b_);
    }
    return {};
  }

  /// Inverse of to_string: fixed:v, inverse-gamma:shape:scale, lognormal:mu:sigma.
  static VariancePrior parse(std::string_view text) {
    const auto parts = detail::split(text, ':');
    auto num = [&](std::size_t i) { return detail::parse_double(parts[i], "prior parameter"); };
    if (parts[0] == "fixed" && parts.size() == 2) return fixed(num(1));
    if (parts[0] == "inverse-gamma" && parts.size() == 3) return inverse_gamma(num(1), num(2));
    if (parts[0] == "lognormal" && parts.size() == 3) return lognormal(num(1), num(2));
    throw DomainError("unknown prior '" + std::string(text) +
                      "' (expected fixed:v, inverse-gamma:shape:scale or lognormal:mu:sigma)");
  }

  friend bool operator==(const VariancePrior&, const VariancePrior&) = default;

 private:
  VariancePrior(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

}  // namespace ranksel
