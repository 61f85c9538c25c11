#pragma once

#include <span>

#include "phaseprior/grid.hpp"
#include "phaseprior/measurement.hpp"

namespace phaseprior {

// Proximal operator of the amplitude data term
//   f(x) = 1/2 || |S U x| - y ||^2,
// built from three pieces: the scalar prox of 1/2 (|z| - y)^2, separability
// across the mask, and conjugation by the unitary U.
//
// lambda may be +infinity, in which case sampled entries are projected
// onto |z| = max(y, 0).

/// argmin_z 1/2 |z - x|^2 + lambda/2 (|z| - y)^2.
///
/// The phase of x is kept (arg 0 is taken as 0) and the magnitude becomes
/// (|x| + lambda y) / (1 + lambda), clamped at 0 when y < 0 drives it negative.
Complex scalar_prox(Complex x, double y, double lambda);

/// Applies scalar_prox at the mask's sampled entries and the identity elsewhere.
/// x is modified in place; y[i] pairs with mask.indices[i].
void masked_prox_inplace(std::span<Complex> x, std::span<const double> y,
                         const SamplingMask& mask, double lambda);
ComplexImage masked_prox(const ComplexImage& x, std::span<const double> y,
                         const SamplingMask& mask, double lambda);

/// prox_{lambda f}(x) = U^H masked_prox(U x, y, lambda).
///
/// The mask is taken from meas.indices, so a restricted MeasurementSet (as
/// used by continuation's first stage) is honoured without a new operator.
ComplexImage data_prox(const MeasurementOperator& op, const ComplexImage& x,
                       const MeasurementSet& meas, double lambda);

/// f(x) = 1/2 sum_i (|(U x)_{k(i)}| - y_i)^2.
double data_fidelity(const MeasurementOperator& op, const ComplexImage& x,
                     const MeasurementSet& meas);

/// Gradient of f in the real (Re, Im) parametrization, packed as
/// dRe + j dIm: U^H S (u - y e^{j arg u}), u = U x.
ComplexImage data_gradient(const MeasurementOperator& op, const ComplexImage& x,
                           const MeasurementSet& meas);

}  // namespace phaseprior
