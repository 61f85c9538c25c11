#pragma once

#include <cstddef>
#include <memory>

#include "phaseprior/grid.hpp"

namespace phaseprior {

/// Unitary 2-D DFT on a fixed height x width grid (1/sqrt(n) on both
/// directions), backed by FFTW.
///
/// Plans are created once per shape and cached process-wide. Execution uses
/// FFTW's new-array interface on caller buffers, so one Fft2d may be used
/// from several threads at once.
class Fft2d {
 public:
  Fft2d(std::size_t height, std::size_t width);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  /// out = F in. in and out may alias.
  void forward(const ComplexImage& in, ComplexImage& out) const;
  /// out = F^H in. in and out may alias.
  void inverse(const ComplexImage& in, ComplexImage& out) const;

  struct Plans;  // opaque FFTW state

 private:
  std::size_t height_;
  std::size_t width_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace phaseprior
