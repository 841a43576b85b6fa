#pragma once

/// Seed-keyed random streams.
///
/// A RandomStream is identified by a 64-bit seed plus an integer path
/// (for example experiment / replication / population).  The path is hashed
/// into a key and the key seeds a xoshiro256** generator, so a child stream
/// depends only on (seed, path) and never on how many numbers its parent has
/// already produced.  Work split across threads by substream therefore gives
/// the same numbers regardless of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace ranksel {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {})
      : seed_(seed), key_(detail::mix64(seed ^ 0x5DEECE66DULL)) {
    for (auto id : path) {
      path_.push_back(id);
      key_ = child_key(key_, id);
    }
    reseed();
  }

  /// Independent child stream keyed by `id`; unaffected by draws already
  /// taken from this stream.
  [[nodiscard]] RandomStream substream(std::uint64_t id) const {
    RandomStream child(*this, child_key(key_, id));
    child.path_.push_back(id);
    return child;
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const std::vector<std::uint64_t>& path() const { return path_; }
  [[nodiscard]] std::uint64_t key() const { return key_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method; the second variate of
  /// each accepted pair is cached in the stream.
  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  RandomStream(const RandomStream& parent, std::uint64_t key)
      : seed_(parent.seed_), key_(key), path_(parent.path_) {
    reseed();
  }

  static std::uint64_t child_key(std::uint64_t key, std::uint64_t id) {
    return detail::mix64(key ^ detail::mix64(id * detail::kGolden + 0x632BE59BD9B4E019ULL));
  }

  void reseed() {
    std::uint64_t x = key_;
    for (auto& s : state_) {
      x += detail::kGolden;
      s = detail::mix64(x);
    }
    has_spare_ = false;
    spare_ = 0.0;
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ranksel
