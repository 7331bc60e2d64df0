#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace wii {

// SplitMix64 step. Small state, full 64-bit avalanche, and trivially
// seekable, which is what the counter-based record seeding relies on.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic sub-stream seed from a master seed and a key path.
// derive_seed(master, stream, index) gives every record / layer / epoch its
// own independent stream, so generation order and thread count never change
// the result.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  s ^= splitmix64(s) + a;
  s ^= splitmix64(s) + b;
  s ^= splitmix64(s) + c;
  return splitmix64(s);
}

// FNV-1a, used to fold variant names into seeds.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Self-contained generator. The standard <random> engines are portable but
// the distributions are not, so uniforms and Gaussians are produced here
// from raw 64-bit draws to keep artifacts byte-identical per seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  bool bit() { return (next_u64() >> 63) != 0; }

  // Standard normal via Box-Muller; second value cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wii
