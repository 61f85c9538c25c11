#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phaseprior/fft.hpp"
#include "phaseprior/grid.hpp"

namespace phaseprior {

/// Random +-1 diagonal modelling the optical diffuser.
struct Diffuser {
  std::vector<std::int8_t> signs;
  std::uint64_t seed = 0;
};

/// Bernoulli(alpha) diagonal sampling mask in the Fourier domain.
struct SamplingMask {
  std::vector<bool> keep;
  /// Sorted flat indices of the kept entries; indices.size() == m.
  std::vector<std::size_t> indices;
  double alpha = 1.0;
  std::uint64_t seed = 0;

  std::size_t n() const { return keep.size(); }
  std::size_t m() const { return indices.size(); }

  /// Builds a mask from an explicit set of kept indices (sorted on return).
  static SamplingMask from_indices(std::size_t n, std::vector<std::size_t> indices,
                                   double alpha, std::uint64_t seed);
};

Diffuser make_diffuser(std::size_t n, std::uint64_t seed);
SamplingMask make_mask(std::size_t n, double alpha, std::uint64_t seed);

/// The structured random model |S F D x| on a height x width grid, F the
/// unitary 2-D DFT. Immutable; safe to share across threads.
class MeasurementOperator {
 public:
  MeasurementOperator(std::size_t height, std::size_t width, Diffuser diffuser,
                      SamplingMask mask);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t n() const { return height_ * width_; }
  const Diffuser& diffuser() const { return diffuser_; }
  const SamplingMask& mask() const { return mask_; }

  /// Same diffuser and grid with a different mask.
  MeasurementOperator with_mask(SamplingMask mask) const;

  /// U x = F (D x).
  ComplexImage apply_unitary(const ComplexImage& x) const;
  /// U^H z = D (F^H z).
  ComplexImage adjoint_unitary(const ComplexImage& z) const;

 private:
  void check(const ComplexImage& x) const;

  std::size_t height_;
  std::size_t width_;
  Diffuser diffuser_;
  SamplingMask mask_;
  Fft2d fft_;
};

/// Observed amplitudes at the sampled indices, plus the noise provenance.
struct MeasurementSet {
  /// y[i] belongs to Fourier index indices[i].
  std::vector<double> y;
  std::vector<std::size_t> indices;
  double sigma_n = 0.0;
  double alpha = 1.0;
  std::uint64_t noise_seed = 0;

  std::size_t m() const { return y.size(); }
};

/// y = |S U x| + n with n ~ N(0, sigma_n^2 I) drawn from noise_seed.
/// Negative amplitudes produced by noise are kept as-is.
MeasurementSet measure(const MeasurementOperator& op, const ComplexImage& x, double sigma_n,
                       std::uint64_t noise_seed);

/// The same measurements restricted to a subset of the sampled indices
/// (sub_mask.indices must be a subset of meas.indices).
MeasurementSet restrict_measurements(const MeasurementSet& meas, const SamplingMask& sub_mask);

/// Seeds and sizes that regenerate an operator and its measurements.
struct OperatorProvenance {
  std::size_t height = 0;
  std::size_t width = 0;
  double alpha = 1.0;
  std::uint64_t diffuser_seed = 0;
  std::uint64_t mask_seed = 0;
  std::uint64_t noise_seed = 0;
  double sigma_n = 0.0;

  MeasurementOperator build_operator() const;
  /// {height, width, alpha, diffuser_seed, mask_seed, noise_seed, sigma_n}
  std::string to_json() const;
  static OperatorProvenance from_json(const std::string& text);
  bool operator==(const OperatorProvenance&) const = default;
};

}  // namespace phaseprior
