#pragma once

#include <cstdint>
#include <random>

namespace bunchkit::random {

/// Seeded 64-bit engine with portable uniform/normal/gamma draws. The
/// standard <random> distributions are implementation-defined, so draws are
/// built directly on the engine's output bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Gamma(shape, 1) via Marsaglia and Tsang's squeeze method; shapes below
  /// one use the Gamma(shape + 1) U^(1/shape) boost.
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bunchkit::random
