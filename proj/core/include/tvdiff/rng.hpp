#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace tvdiff {

// All randomness in the library flows through Rng handles derived from one
// master seed. Distributions are implemented here rather than through
// std::uniform_real_distribution et al., whose output sequences are
// implementation-defined; mt19937_64 itself is pinned by the standard, so a
// given (seed, call sequence) produces the same draws on every platform.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Fixed salts naming each consumer of randomness. Every (seed, stream, key)
// triple yields an independent sequence, so e.g. the train/test splitter and
// the parameter initializer never share draws no matter the call order.
enum class Stream : std::uint64_t {
  kSplit = 1,        // per-user train/test partition (key = user index)
  kValSplit = 2,     // per-user internal validation holdout
  kParamInit = 3,    // model parameter initialization
  kCorrupt = 4,      // forward-process noise and timestep draws (key = epoch)
  kNegSample = 5,    // negative sampling (key = epoch)
  kEpochShuffle = 6, // batch order (key = epoch)
  kSynthetic = 7,    // synthetic corpus generation in tests/benchmarks
  kEval = 8,         // any randomness needed at evaluation time
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng derive(std::uint64_t seed, Stream stream, std::uint64_t key = 0) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= key * 0xd1b54a32d192ed03ULL;
    std::uint64_t c = splitmix64(s);
    return Rng(a ^ b ^ c);
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); never returns 0, so log() is always finite.
  double uniform_open01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound); bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; draws come out in pairs, the spare is
  // cached so consecutive calls consume the underlying stream predictably.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u = uniform_open01();
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * M_PI * v;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Standard Gumbel: g = -log(-log(u)), u ~ Uniform(0,1).
  double gumbel() { return -std::log(-std::log(uniform_open01())); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tvdiff
