#include <cmath>

#include "phaseprior/regularizers.hpp"

namespace phaseprior {

namespace {

void check_eps(double huber_eps) {
  if (!(huber_eps > 0.0)) throw InvalidParameter("huber_eps must be > 0");
}

// Visits every pixel with its forward differences (zero across the border).
template <class F>
void for_each_difference(const RealPlane& p, F&& f) {
  const std::size_t h = p.height();
  const std::size_t w = p.width();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double v = p(r, c);
      const double dx = c + 1 < w ? p(r, c + 1) - v : 0.0;
      const double dy = r + 1 < h ? p(r + 1, c) - v : 0.0;
      f(r, c, dx, dy);
    }
  }
}

double huber(double t, double eps) { return t <= eps ? 0.5 * t * t / eps : t - 0.5 * eps; }

// Fused value and gradient; grad = D^T (huber'(t)/t * D p).
double tv_evaluate(const RealPlane& p, double huber_eps, RealPlane* grad) {
  const std::size_t h = p.height();
  const std::size_t w = p.width();
  if (grad) *grad = RealPlane(h, w);
  double s = 0.0;
  for_each_difference(p, [&](std::size_t r, std::size_t c, double dx, double dy) {
    const double t = std::sqrt(dx * dx + dy * dy);
    s += huber(t, huber_eps);
    if (!grad) return;
    const double weight = t <= huber_eps ? 1.0 / huber_eps : 1.0 / t;
    const double ax = weight * dx;
    const double ay = weight * dy;
    auto& g = *grad;
    if (c + 1 < w) {
      g(r, c) -= ax;
      g(r, c + 1) += ax;
    }
    if (r + 1 < h) {
      g(r, c) -= ay;
      g(r + 1, c) += ay;
    }
  });
  return s;
}

}  // namespace

double tv_value(const RealPlane& p, double huber_eps) {
  check_eps(huber_eps);
  return tv_evaluate(p, huber_eps, nullptr);
}

RealPlane tv_grad(const RealPlane& p, double huber_eps) {
  check_eps(huber_eps);
  RealPlane g;
  tv_evaluate(p, huber_eps, &g);
  return g;
}

SmoothedTv::SmoothedTv(double huber_eps, double sigma) : huber_eps_(huber_eps), sigma_(sigma) {
  check_eps(huber_eps);
}

double SmoothedTv::value(const RealPlane& p) const { return tv_value(p, huber_eps_); }

RealPlane SmoothedTv::gradient(const RealPlane& p) const { return tv_grad(p, huber_eps_); }

PlaneEvaluation SmoothedTv::evaluate(const RealPlane& p) const {
  PlaneEvaluation e;
  e.value = tv_evaluate(p, huber_eps_, &e.gradient);
  return e;
}

std::shared_ptr<const PlaneRegularizer> SmoothedTv::at_sigma(double sigma) const {
  return std::make_shared<SmoothedTv>(huber_eps_, sigma);
}

}  // namespace phaseprior
