#pragma once

#include <optional>

#include "phaseprior/grid.hpp"

namespace phaseprior {

/// Grayscale [0,1] -> unit-magnitude phase image, x = exp(j pi (p - 1/2)).
/// Throws ValidationError listing out-of-range (or non-finite) pixels.
ComplexImage encode_image(const RealPlane& p);

/// p = arg(x')/pi + 1/2 clipped to [0,1]. With a reference, x' = e^{-j theta} x
/// where theta = arg <reference, x> maximizes Re <e^{-j theta} x, reference>;
/// without one, x' = x.
RealPlane decode_image(const ComplexImage& x, const std::optional<ComplexImage>& reference = {});

/// 10 log10(peak^2 / MSE); +infinity when the planes are identical.
double psnr(const RealPlane& p, const RealPlane& q, double peak = 1.0);

/// |<x, y>| / (||x|| ||y||). Throws UndefinedMetric for a zero input.
double cosine_similarity(const ComplexImage& x, const ComplexImage& y);

}  // namespace phaseprior
