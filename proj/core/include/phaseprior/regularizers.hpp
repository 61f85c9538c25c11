#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "phaseprior/grid.hpp"

namespace phaseprior {

// ---------------------------------------------------------------------------
// Huber-smoothed isotropic total variation on a real plane.
//
// Forward differences with replicate (Neumann) boundary: the difference
// across the last column / last row is zero. Per pixel the gradient
// magnitude t = sqrt(dx^2 + dy^2) is passed through
//   huber(t) = t^2 / (2 eps)   for t <= eps
//            = t - eps / 2     otherwise.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultHuberEps = 1e-2;

double tv_value(const RealPlane& p, double huber_eps);
RealPlane tv_grad(const RealPlane& p, double huber_eps);

struct PlaneEvaluation {
  double value = 0.0;
  RealPlane gradient;
};

enum class RegularizerKind { SmoothedTv, ExternalPlugin };

/// Differentiable prior R_sigma on a real plane.
class PlaneRegularizer {
 public:
  virtual ~PlaneRegularizer() = default;

  virtual RegularizerKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual double sigma() const = 0;

  virtual double value(const RealPlane& p) const = 0;
  virtual RealPlane gradient(const RealPlane& p) const = 0;
  virtual PlaneEvaluation evaluate(const RealPlane& p) const {
    return {value(p), gradient(p)};
  }

  /// Upper bound on Lip(grad R_sigma), if the regularizer declares one.
  virtual std::optional<double> lipschitz() const = 0;

  /// The same prior at another noise parameter. Priors that ignore sigma
  /// return an equivalent copy.
  virtual std::shared_ptr<const PlaneRegularizer> at_sigma(double sigma) const = 0;
};

class SmoothedTv final : public PlaneRegularizer {
 public:
  explicit SmoothedTv(double huber_eps = kDefaultHuberEps, double sigma = 1.0);

  RegularizerKind kind() const override { return RegularizerKind::SmoothedTv; }
  std::string name() const override { return "smoothed-tv"; }
  double sigma() const override { return sigma_; }
  double huber_eps() const { return huber_eps_; }

  double value(const RealPlane& p) const override;
  RealPlane gradient(const RealPlane& p) const override;
  PlaneEvaluation evaluate(const RealPlane& p) const override;
  /// 8 / huber_eps: ||D||^2 <= 8 for 2-D forward differences, Lip(huber') = 1/eps.
  std::optional<double> lipschitz() const override { return 8.0 / huber_eps_; }
  std::shared_ptr<const PlaneRegularizer> at_sigma(double sigma) const override;

 private:
  double huber_eps_;
  double sigma_;
};

// ---------------------------------------------------------------------------
// Complex magnitude / normalized-phase split
//   R(x) = base(|x|) + base(arg(x) / 2pi),  arg in (-pi, pi].
// ---------------------------------------------------------------------------

/// Floor on |x| in the phase chain rule. At 1/(2 pi) the chain-rule factor
/// 1/(2 pi delta)^2 of the Lipschitz bound is exactly 1.
inline constexpr double kDefaultMagnitudeFloor = 0.5 / std::numbers::pi;

struct LipschitzBound {
  double L = 1.0;
  double step() const { return 1.0 / L; }
};

struct SplitEvaluation {
  double value = 0.0;
  ComplexImage gradient;
};

class ComplexSplitRegularizer {
 public:
  explicit ComplexSplitRegularizer(std::shared_ptr<const PlaneRegularizer> base,
                                   double magnitude_floor = kDefaultMagnitudeFloor);

  const PlaneRegularizer& base() const { return *base_; }
  std::shared_ptr<const PlaneRegularizer> base_ptr() const { return base_; }
  double magnitude_floor() const { return magnitude_floor_; }

  double value(const ComplexImage& x) const;
  /// Gradient in the (Re x, Im x) parametrization packed as dRe + j dIm:
  ///   g_m e^{j arg x} + g_phi / (2 pi max(|x|, delta)) * j e^{j arg x}
  ComplexImage gradient(const ComplexImage& x) const;
  SplitEvaluation evaluate(const ComplexImage& x) const;

  /// Smoothed TV: sum of the plane bounds, the phase plane scaled by
  /// max(1, 1/(2 pi delta)^2). External plugins: their declared bound as-is.
  /// Throws MissingCapability if the base declares no bound.
  LipschitzBound lipschitz_bound() const;

  ComplexSplitRegularizer at_sigma(double sigma) const;

 private:
  std::shared_ptr<const PlaneRegularizer> base_;
  double magnitude_floor_;
};

double split_value(const ComplexSplitRegularizer& reg, const ComplexImage& x);
ComplexImage split_grad(const ComplexSplitRegularizer& reg, const ComplexImage& x);
LipschitzBound lipschitz_bound(const ComplexSplitRegularizer& reg);

// ---------------------------------------------------------------------------
// Plugin conformance: finite-difference gradient check and nonnegativity on
// random planes. Solvers should only be handed plugins that pass.
// ---------------------------------------------------------------------------

struct ConformanceReport {
  bool passed = false;
  int trials = 0;
  double worst_relative_error = 0.0;
  double min_value = 0.0;
  std::string message;
};

ConformanceReport check_plugin_conformance(const PlaneRegularizer& reg, std::size_t height,
                                           std::size_t width, std::uint64_t seed,
                                           int trials = 50, double tolerance = 1e-4,
                                           double fd_step = 1e-6);

}  // namespace phaseprior
