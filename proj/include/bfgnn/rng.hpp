#pragma once

#include <cstdint>
#include <random>

namespace bfgnn {

/// Seeded generator with explicitly-coded draw helpers so that generated
/// datasets are reproducible byte-for-byte across platforms (the standard
/// distributions are implementation-defined; mt19937_64 itself is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  bool next_bool(double p) { return next_double(0.0, 1.0) < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bfgnn
