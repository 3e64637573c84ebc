#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace rcn {

namespace detail {

inline std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t
fnv1a(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace detail

//! Deterministic random stream.
//!
//! Built on std::mt19937_64, whose output sequence is fixed by the
//! standard, and converts bits to reals by hand so that draws are identical
//! across standard library implementations. Independent streams for a
//! (repetition, stage) pair are obtained with `derive`; the derived stream
//! depends only on the master seed and the path, never on how many draws
//! were taken from the parent.
class SeededRng
{
public:
  explicit SeededRng(std::uint64_t seed = 0)
    : seed_(seed)
    , engine_(detail::splitmix64(seed))
  {}

  std::uint64_t seed() const { return seed_; }

  SeededRng derive(std::uint64_t repetition, std::string_view stage) const
  {
    std::uint64_t s = detail::splitmix64(seed_ ^ 0x5851f42d4c957f2dULL);
    s = detail::splitmix64(s ^ detail::splitmix64(repetition + 1));
    s = detail::splitmix64(s ^ detail::fnv1a(stage));
    return SeededRng(s);
  }

  SeededRng derive(std::string_view stage) const { return derive(0, stage); }

  std::uint64_t next_u64() { return engine_(); }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  //! Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t uniform_index(std::uint64_t n)
  {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  //! Standard normal draw (Box-Muller, one value per call).
  double normal()
  {
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  //! Fisher-Yates shuffle.
  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last)
  {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = uniform_index(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace rcn
