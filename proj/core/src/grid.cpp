#include "phaseprior/grid.hpp"

#include <cmath>
#include <numbers>

namespace phaseprior {

double squared_norm(const ComplexImage& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

double norm(const ComplexImage& x) { return std::sqrt(squared_norm(x)); }

Complex inner(const ComplexImage& a, const ComplexImage& b) {
  require_same_shape(a, b, "inner product of images with different shapes");
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

bool all_finite(const ComplexImage& x) {
  for (const auto& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double principal_arg(Complex z) {
  const double a = std::arg(z);
  // std::arg returns -pi for negative reals with a -0.0 imaginary part.
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

RealPlane magnitude_plane(const ComplexImage& x) {
  RealPlane p(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = std::abs(x[i]);
  return p;
}

RealPlane normalized_phase_plane(const ComplexImage& x) {
  RealPlane p(x.height(), x.width());
  const double inv_two_pi = 0.5 / std::numbers::pi;
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = principal_arg(x[i]) * inv_two_pi;
  return p;
}

}  // namespace phaseprior
