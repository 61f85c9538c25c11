#include "phaseprior/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "phaseprior/random.hpp"

namespace phaseprior {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

ComplexSplitRegularizer::ComplexSplitRegularizer(std::shared_ptr<const PlaneRegularizer> base,
                                                 double magnitude_floor)
    : base_(std::move(base)), magnitude_floor_(magnitude_floor) {
  if (!base_) throw InvalidParameter("split regularizer needs a base regularizer");
  if (!(magnitude_floor_ > 0.0)) throw InvalidParameter("magnitude floor must be > 0");
}

double ComplexSplitRegularizer::value(const ComplexImage& x) const {
  return base_->value(magnitude_plane(x)) + base_->value(normalized_phase_plane(x));
}

SplitEvaluation ComplexSplitRegularizer::evaluate(const ComplexImage& x) const {
  const auto mag = base_->evaluate(magnitude_plane(x));
  const auto phase = base_->evaluate(normalized_phase_plane(x));
  require_same_shape(mag.gradient, x, "base regularizer returned a gradient of the wrong shape");
  require_same_shape(phase.gradient, x, "base regularizer returned a gradient of the wrong shape");

  SplitEvaluation out;
  out.value = mag.value + phase.value;
  out.gradient = ComplexImage(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    const Complex unit = a > 0.0 ? x[i] / a : Complex(1.0, 0.0);
    const double phase_scale = phase.gradient[i] / (kTwoPi * std::max(a, magnitude_floor_));
    out.gradient[i] = mag.gradient[i] * unit + phase_scale * Complex(0.0, 1.0) * unit;
  }
  return out;
}

ComplexImage ComplexSplitRegularizer::gradient(const ComplexImage& x) const {
  return evaluate(x).gradient;
}

LipschitzBound ComplexSplitRegularizer::lipschitz_bound() const {
  const auto plane = base_->lipschitz();
  if (!plane) {
    throw MissingCapability("regularizer '" + base_->name() +
                            "' does not declare a Lipschitz bound");
  }
  // A plugin's declaration already covers the whole split.
  if (base_->kind() == RegularizerKind::ExternalPlugin) return LipschitzBound{*plane};
  const double chain = 1.0 / (kTwoPi * magnitude_floor_);
  const double phase_factor = std::max(1.0, chain * chain);
  return LipschitzBound{*plane + *plane * phase_factor};
}

ComplexSplitRegularizer ComplexSplitRegularizer::at_sigma(double sigma) const {
  return ComplexSplitRegularizer(base_->at_sigma(sigma), magnitude_floor_);
}

double split_value(const ComplexSplitRegularizer& reg, const ComplexImage& x) {
  return reg.value(x);
}

ComplexImage split_grad(const ComplexSplitRegularizer& reg, const ComplexImage& x) {
  return reg.gradient(x);
}

LipschitzBound lipschitz_bound(const ComplexSplitRegularizer& reg) {
  return reg.lipschitz_bound();
}

ConformanceReport check_plugin_conformance(const PlaneRegularizer& reg, std::size_t height,
                                           std::size_t width, std::uint64_t seed, int trials,
                                           double tolerance, double fd_step) {
  ConformanceReport report;
  report.trials = trials;
  report.min_value = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  const double h = fd_step;

  for (int t = 0; t < trials; ++t) {
    RealPlane p(height, width);
    for (auto& v : p) v = rng.uniform();

    const auto eval = reg.evaluate(p);
    if (!std::isfinite(eval.value) || eval.value < 0.0) {
      std::ostringstream os;
      os << "value " << eval.value << " is not a finite nonnegative number (trial " << t << ")";
      report.message = os.str();
      report.min_value = eval.value;
      return report;
    }
    report.min_value = std::min(report.min_value, eval.value);
    if (!eval.gradient.same_shape(p)) {
      report.message = "gradient shape differs from input shape";
      return report;
    }

    double diff2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      RealPlane plus = p;
      RealPlane minus = p;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (reg.value(plus) - reg.value(minus)) / (2.0 * h);
      diff2 += (fd - eval.gradient[i]) * (fd - eval.gradient[i]);
      ref2 += fd * fd;
    }
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-12);
    report.worst_relative_error = std::max(report.worst_relative_error, rel);
  }

  report.passed = report.worst_relative_error < tolerance;
  if (!report.passed) {
    std::ostringstream os;
    os << "finite-difference relative error " << report.worst_relative_error
       << " exceeds " << tolerance;
    report.message = os.str();
  }
  return report;
}

}  // namespace phaseprior
