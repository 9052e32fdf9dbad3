#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dfrc {

// splitmix64 finalizer; decorrelates (seed, stream) pairs before seeding the engine.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix_seed(seed, stream)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform_centered() { return uniform_(engine_) - 0.5; }

  // CN(0,1): real and imaginary parts N(0, 1/2).
  std::complex<double> cnormal() {
    constexpr double inv_sqrt2 = 0.70710678118654752;
    const double re = normal();
    const double im = normal();
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace dfrc
