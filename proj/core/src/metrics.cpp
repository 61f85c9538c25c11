#include "phaseprior/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace phaseprior {

ComplexImage encode_image(const RealPlane& p) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << bad.size() << " pixel(s) outside [0,1], first at index " << bad.front();
    throw ValidationError(os.str(), std::move(bad));
  }
  ComplexImage x(p.height(), p.width());
  for (std::size_t i = 0; i < p.size(); ++i) {
    x[i] = std::polar(1.0, std::numbers::pi * (p[i] - 0.5));
  }
  return x;
}

RealPlane decode_image(const ComplexImage& x, const std::optional<ComplexImage>& reference) {
  Complex rotation(1.0, 0.0);
  if (reference) {
    const Complex c = inner(*reference, x);
    if (std::abs(c) > 0.0) rotation = std::conj(c) / std::abs(c);
  }
  RealPlane p(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = principal_arg(x[i] * rotation) / std::numbers::pi + 0.5;
    p[i] = std::clamp(v, 0.0, 1.0);
  }
  return p;
}

double psnr(const RealPlane& p, const RealPlane& q, double peak) {
  require_same_shape(p, q, "PSNR of planes with different shapes");
  if (p.empty()) throw InvalidDimension("PSNR of empty planes");
  double mse = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) mse += (p[i] - q[i]) * (p[i] - q[i]);
  mse /= static_cast<double>(p.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double cosine_similarity(const ComplexImage& x, const ComplexImage& y) {
  require_same_shape(x, y, "cosine similarity of images with different shapes");
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) throw UndefinedMetric("cosine similarity of a zero image");
  return std::min(1.0, std::abs(inner(x, y)) / (nx * ny));
}

}  // namespace phaseprior
