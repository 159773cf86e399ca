#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qcomp {

// (seed, stream) address of a reproducible random sequence. Distinct streams
// under one seed are statistically independent, so parallel work items can
// each own a stream and produce results independent of scheduling.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSeed with_stream(std::uint64_t s) const { return RngSeed{seed, s}; }
  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Engine plus hand-written distributions: std::normal_distribution is
// implementation-defined, and files produced from a seed must not depend on
// the standard library in use.
class Rng {
 public:
  explicit Rng(RngSeed s) : engine_(mix64(mix64(s.seed) ^ mix64(s.stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal();

  // circularly symmetric complex Gaussian with E|z|^2 = 1
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865476, im * 0.7071067811865476};
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qcomp
