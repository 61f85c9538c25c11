#include "phaseprior/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace phaseprior {

namespace {

std::vector<double> gaussian_kernel(double stddev) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * stddev));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * double(i * i) / (stddev * stddev));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::ptrdiff_t clamp_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  return std::clamp<std::ptrdiff_t>(i, 0, n - 1);
}

}  // namespace

GaussianDenoiser::GaussianDenoiser(double width_at_unit_sigma) : width_(width_at_unit_sigma) {
  if (!(width_ > 0.0)) throw InvalidParameter("denoiser width must be > 0");
}

RealPlane GaussianDenoiser::denoise(const RealPlane& plane, double sigma) const {
  if (!(sigma > 0.0)) throw InvalidParameter("denoiser sigma must be > 0");
  const double stddev = sigma * width_;
  if (stddev < 0.1) return plane;

  const auto kernel = gaussian_kernel(stddev);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto h = static_cast<std::ptrdiff_t>(plane.height());
  const auto w = static_cast<std::ptrdiff_t>(plane.width());

  RealPlane tmp(plane.height(), plane.width());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        s += kernel[std::size_t(k + radius)] * plane(std::size_t(r), std::size_t(clamp_index(c + k, w)));
      }
      tmp(std::size_t(r), std::size_t(c)) = s;
    }
  }
  RealPlane out(plane.height(), plane.width());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        s += kernel[std::size_t(k + radius)] * tmp(std::size_t(clamp_index(r + k, h)), std::size_t(c));
      }
      out(std::size_t(r), std::size_t(c)) = s;
    }
  }
  return out;
}

ComplexImage denoise_split(const Denoiser& denoiser, const ComplexImage& x, double sigma) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  RealPlane phase = normalized_phase_plane(x);
  for (auto& v : phase) v += 0.5;

  const RealPlane mag = denoiser.denoise(magnitude_plane(x), sigma);
  const RealPlane den_phase = denoiser.denoise(phase, sigma);
  if (!mag.same_shape(x) || !den_phase.same_shape(x)) {
    throw InvalidDimension("denoiser '" + denoiser.name() + "' changed the plane shape");
  }

  ComplexImage out(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = std::max(mag[i], 0.0);
    const double angle = kTwoPi * (den_phase[i] - 0.5);
    out[i] = std::polar(m, angle);
  }
  return out;
}

}  // namespace phaseprior
