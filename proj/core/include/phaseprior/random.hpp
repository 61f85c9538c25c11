#pragma once

#include <cstdint>
#include <random>

#include "phaseprior/grid.hpp"

namespace phaseprior {

/// Seedable generator with bit-identical output on every platform.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The std distributions are implementation-defined, so uniform and normal
/// variates are derived here from the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller (one cached spare).
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; derives independent sub-seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// x ~ CN(0, I): real and imaginary parts i.i.d. N(0, 1/2).
ComplexImage complex_gaussian(std::size_t height, std::size_t width, std::uint64_t seed);

}  // namespace phaseprior
