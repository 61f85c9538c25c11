#pragma once

#include <memory>
#include <string>

#include "phaseprior/grid.hpp"

namespace phaseprior {

/// D_sigma acting on a single real plane. Implementations must return a
/// finite plane of the input's shape.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::string name() const = 0;
  virtual RealPlane denoise(const RealPlane& plane, double sigma) const = 0;
};

using DenoiserHandle = std::shared_ptr<const Denoiser>;

/// Built-in stand-in: separable Gaussian blur with standard deviation
/// sigma * width_at_unit_sigma pixels, replicate boundary, kernel truncated
/// at three standard deviations. Below a tenth of a pixel it is the identity.
class GaussianDenoiser final : public Denoiser {
 public:
  explicit GaussianDenoiser(double width_at_unit_sigma = 3.0);
  std::string name() const override { return "gaussian-standin"; }
  RealPlane denoise(const RealPlane& plane, double sigma) const override;
  double width_at_unit_sigma() const { return width_; }

 private:
  double width_;
};

/// Passes planes through unchanged. Useful for fixed-point checks.
class IdentityDenoiser final : public Denoiser {
 public:
  std::string name() const override { return "identity"; }
  RealPlane denoise(const RealPlane& plane, double) const override { return plane; }
};

/// Splits x into magnitude and phase planes, denoises both, recombines.
///
/// The phase plane is handed to the denoiser as arg(x)/2pi + 1/2, i.e. in
/// [0, 1]; the magnitude plane is passed as-is and clamped at 0 on return.
ComplexImage denoise_split(const Denoiser& denoiser, const ComplexImage& x, double sigma);

}  // namespace phaseprior
