#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace reprrec {

// 64-bit FNV-1a; doubles as the manifest content checksum
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// All randomness flows from one run seed, fanned out per stage by label (and
// an optional salt such as a worker id) so partial re-runs stay reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t salt = 0) {
  return splitmix64(fnv1a64(label, base ^ 0xcbf29ce484222325ull) + salt);
}

// mt19937_64 behind a portable double mapping (uniform_real_distribution is
// implementation-defined; the shift-and-scale below is not)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // unbiased integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace reprrec
