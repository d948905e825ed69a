#pragma once
#include <cstdint>

namespace combat {

// Deterministic 64-bit generator (splitmix64).  The standard <random> engines
// are fine but their *distributions* are implementation-defined, which would
// make seeded runs differ across toolchains; this keeps every draw portable
// and the whole state a single u64 that serializes trivially.
class Rng {
 public:
  Rng() : state_(0x9e3779b97f4a7c15ULL) {}
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n > 0.  Multiply-shift reduction; the modulo bias is
  // below 2^-32 for the small n used here.
  uint64_t bounded(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  int bounded_int(int n) { return static_cast<int>(bounded(static_cast<uint64_t>(n))); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool chance(double p) { return uniform() < p; }

  // Derive an independent stream, e.g. one per match seat.
  Rng split(uint64_t stream_tag) {
    return Rng(next_u64() ^ (0x6a09e667f3bcc909ULL * (stream_tag + 1)));
  }

  uint64_t state() const { return state_; }
  void set_state(uint64_t s) { state_ = s; }

 private:
  uint64_t state_;
};

// Stateless mix of several seeds into one, for deriving per-entity streams
// reproducibly (hash of the inputs, not a running draw).
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x51afd7ed558ccd25ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace combat
