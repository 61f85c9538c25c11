#include "phaseprior/prox.hpp"

#include <cmath>

namespace phaseprior {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw InvalidParameter("prox weight lambda must be >= 0");
}

Complex unit_phase(Complex x) {
  const double a = std::abs(x);
  return a > 0.0 ? x / a : Complex(1.0, 0.0);
}

Complex scalar_prox_unchecked(Complex x, double y, double lambda) {
  if (lambda == 0.0) return x;
  const double ax = std::abs(x);
  double magnitude;
  if (std::isinf(lambda)) {
    magnitude = y;
  } else {
    magnitude = (ax + lambda * y) / (1.0 + lambda);
  }
  if (magnitude <= 0.0) return Complex(0.0, 0.0);
  return magnitude * unit_phase(x);
}

void check_measurement_shape(const SamplingMask& mask, std::size_t n, std::size_t y_len) {
  if (mask.n() != n) throw InvalidDimension("mask length does not match the signal");
  if (mask.m() != y_len) throw InvalidDimension("amplitude vector length must equal mask.m");
}

void prox_on_indices(std::span<Complex> u, std::span<const double> y,
                     std::span<const std::size_t> indices, double lambda) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto& v = u[indices[i]];
    v = scalar_prox_unchecked(v, y[i], lambda);
  }
}

void check_meas(const MeasurementOperator& op, const MeasurementSet& meas) {
  if (meas.indices.size() != meas.y.size()) {
    throw InvalidDimension("measurement indices and amplitudes differ in length");
  }
  for (auto k : meas.indices) {
    if (k >= op.n()) throw InvalidDimension("measurement index outside the operator grid");
  }
}

}  // namespace

Complex scalar_prox(Complex x, double y, double lambda) {
  check_lambda(lambda);
  return scalar_prox_unchecked(x, y, lambda);
}

void masked_prox_inplace(std::span<Complex> x, std::span<const double> y,
                         const SamplingMask& mask, double lambda) {
  check_lambda(lambda);
  check_measurement_shape(mask, x.size(), y.size());
  prox_on_indices(x, y, mask.indices, lambda);
}

ComplexImage masked_prox(const ComplexImage& x, std::span<const double> y,
                         const SamplingMask& mask, double lambda) {
  ComplexImage out = x;
  masked_prox_inplace(out.values(), y, mask, lambda);
  return out;
}

ComplexImage data_prox(const MeasurementOperator& op, const ComplexImage& x,
                       const MeasurementSet& meas, double lambda) {
  check_lambda(lambda);
  check_meas(op, meas);
  ComplexImage u = op.apply_unitary(x);
  prox_on_indices(u.values(), meas.y, meas.indices, lambda);
  return op.adjoint_unitary(u);
}

double data_fidelity(const MeasurementOperator& op, const ComplexImage& x,
                     const MeasurementSet& meas) {
  check_meas(op, meas);
  const ComplexImage u = op.apply_unitary(x);
  double s = 0.0;
  for (std::size_t i = 0; i < meas.indices.size(); ++i) {
    const double d = std::abs(u[meas.indices[i]]) - meas.y[i];
    s += d * d;
  }
  return 0.5 * s;
}

ComplexImage data_gradient(const MeasurementOperator& op, const ComplexImage& x,
                           const MeasurementSet& meas) {
  check_meas(op, meas);
  const ComplexImage u = op.apply_unitary(x);
  ComplexImage r(u.height(), u.width());
  for (std::size_t i = 0; i < meas.indices.size(); ++i) {
    const auto k = meas.indices[i];
    r[k] = u[k] - meas.y[i] * unit_phase(u[k]);
  }
  return op.adjoint_unitary(r);
}

}  // namespace phaseprior
