#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace heavytail {

namespace detail {

// SplitMix64 finalizer; used both to expand seeds and to mix stream ids.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Descriptor of a reproducible random stream. The same (master_seed, stream_id)
/// pair always replays the same variate sequence; distinct stream_ids give
/// statistically independent streams, so parallel workers can each derive their
/// own stream without coordinating.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Derive a child stream. Children of distinct (stream_id, child) pairs are
  /// independent; derivation is pure, so it commutes with any scheduling order.
  RngStream substream(std::uint64_t child) const {
    std::uint64_t s = stream_id ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t mixed = detail::splitmix64(s);
    s = mixed ^ child;
    return RngStream{master_seed, detail::splitmix64(s)};
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// xoshiro256++ generator seeded from an RngStream descriptor via SplitMix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(const RngStream& stream) {
    std::uint64_t seed = stream.master_seed;
    std::uint64_t mix = detail::splitmix64(seed);
    seed = mix ^ stream.stream_id;
    for (auto& word : state_) word = detail::splitmix64(seed);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform variate strictly inside (0, 1): ((x >> 11) + 0.5) * 2^-53.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms, caches the partner.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double exponential() { return -std::log(uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline std::vector<double> draw_uniform(const RngStream& stream, std::size_t n) {
  Xoshiro256pp gen(stream);
  std::vector<double> out(n);
  for (auto& v : out) v = gen.uniform();
  return out;
}

inline std::vector<double> draw_normal(const RngStream& stream, std::size_t n) {
  Xoshiro256pp gen(stream);
  std::vector<double> out(n);
  for (auto& v : out) v = gen.normal();
  return out;
}

inline std::vector<double> draw_exponential(const RngStream& stream, std::size_t n) {
  Xoshiro256pp gen(stream);
  std::vector<double> out(n);
  for (auto& v : out) v = gen.exponential();
  return out;
}

}  // namespace heavytail
