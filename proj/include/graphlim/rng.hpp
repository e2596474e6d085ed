#pragma once

#include <cmath>
#include <cstdint>

namespace graphlim {

// Counter-based generator (splitmix64 finalizer over key + counter).
// Streams are derived from a root seed by hashing the stream id into the
// key, so parallel shards draw from disjoint, reproducible sequences and
// results do not depend on thread count or evaluation order.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream * kGolden + 0x1d8af4f3c1e7afc3ULL))) {}

  CounterRng split(uint64_t stream) const {
    CounterRng r(0);
    r.key_ = mix(key_ ^ mix((stream + 1) * kGolden));
    r.ctr_ = 0;
    return r;
  }

  uint64_t next_u64() { return mix(key_ + (++ctr_) * kGolden); }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * next_unit(); }

  // Inclusive range, rejection-free modulo bias is negligible for the
  // small ranges used here but we reject anyway.
  int uniform_int(int lo, int hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t u;
    do {
      u = next_u64();
    } while (u >= limit);
    return lo + static_cast<int>(u % span);
  }

  bool bernoulli(double p) { return next_unit() < p; }

  // Stateless pair hash used by the pairwise edge samplers: the decision
  // for pair (a, b) depends only on (seed, a, b).
  static uint64_t hash3(uint64_t seed, uint64_t a, uint64_t b) {
    return mix(mix(seed) ^ mix(a * kGolden + 0x94d049bb133111ebULL) ^
               mix(b * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL));
  }

  static double unit_from(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static uint64_t mix(uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t ctr_ = 0;
};

}  // namespace graphlim
