#pragma once
// Counter-based per-shot RNG. Each shot owns an independent stream derived
// from (seed, shot) by integer hashing, so results are independent of thread
// count and scheduling: shot i draws the same values whether it runs on 1 or
// 64 threads. splitmix64 throughout; no platform-dependent distributions.

#include <cstdint>
#include <vector>

namespace mpst {

struct RngStream {
  std::uint64_t state = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static RngStream for_shot(std::uint64_t seed, std::uint64_t shot) {
    RngStream r;
    r.state = mix(seed ^ mix(shot ^ 0x5851f42d4c957f2dULL));
    return r;
  }

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bit() { return (next() >> 63) != 0; }

  // Index into a cumulative distribution (cum is nondecreasing, back() ~ 1).
  int pick_cumulative(const std::vector<double>& cum) {
    double r = uniform();
    int lo = 0, hi = static_cast<int>(cum.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (r < cum[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }
};

}  // namespace mpst
