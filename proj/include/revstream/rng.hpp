#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace revstream {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// splitmix64 finalizer over the pair, for deriving per-record / per-stream
/// seeds from one run seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic draw stream; identical across platforms for a fixed seed
/// (mt19937_64 output is pinned by the standard, and the bounded draw avoids
/// distribution classes on purpose).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform-ish draw in [0, n). Modulo bias is negligible for the small
  /// ranges used here.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace revstream
