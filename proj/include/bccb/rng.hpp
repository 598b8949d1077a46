#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bccb {

// Counter-based generator: draw k is splitmix64_mix(base + k * gamma), a pure
// function of (seed, stream, k). Sequential use walks the counter; parallel
// kernels jump to an absolute counter with skip_to() and reproduce the
// sequential stream bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : base_(derive_base(seed, stream)) {}

  std::uint64_t next_u64() noexcept { return mix(base_ + ++counter_ * kGamma); }

  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_unit_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller cosine branch. Consumes exactly two draws, so
  // element i of a data-parallel kernel starts at counter 2*i.
  double next_gaussian() noexcept {
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double next_lognormal(double mu, double sigma) noexcept {
    return std::exp(mu + sigma * next_gaussian());
  }

  // Gamma(shape, 1) by the Marsaglia-Tsang squeeze; shape < 1 uses the
  // Gamma(shape+1) * U^(1/shape) boost. Draw count is variable, so gamma and
  // beta sampling are for sequential consumers only.
  double next_gamma(double shape);

  void skip_to(std::uint64_t counter) noexcept { counter_ = counter; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_base(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(mix(seed) ^ (0xD2B74407B1CE6E93ULL * (stream + 1)));
  }

  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

inline double Rng::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("next_gamma: shape must be positive");
  if (shape < 1.0) {
    const double boost = std::pow(next_unit_pos(), 1.0 / shape);
    return next_gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_unit_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace bccb
