#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace aoisim {

// SplitMix64 mixing step; used only to derive seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One random substream. The engine is std::mt19937_64, whose output sequence
// the standard pins bit-exactly; uniform doubles take the top 53 bits, so
// traces reproduce identically on any platform for a given seed.
class Stream {
 public:
  Stream() : engine_(0) {}
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n), n >= 1. Rejection keeps the draw exact.
  std::uint64_t next_below(std::uint64_t n) {
    assert(n >= 1);
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Seed layout for one simulation run. Every (replication, stream-id) pair maps
// to an independent engine, so arrival draws stay identical across policies
// (common random numbers) regardless of what other streams consume.
//
// Stream ids used by the simulator: 0..N-1 per-terminal arrivals, N policy
// randomness, N+1 contention coin flips.
class RunRng {
 public:
  RunRng(std::uint64_t base_seed, std::uint64_t replication)
      : master_(splitmix64(splitmix64(base_seed) + replication)) {}

  Stream stream(std::uint64_t id) const {
    return Stream(splitmix64(master_ + 0x9e3779b97f4a7c15ULL * (id + 1)));
  }

 private:
  std::uint64_t master_;
};

}  // namespace aoisim
