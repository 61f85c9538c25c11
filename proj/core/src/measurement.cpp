#include "phaseprior/measurement.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "phaseprior/random.hpp"

namespace phaseprior {

SamplingMask SamplingMask::from_indices(std::size_t n, std::vector<std::size_t> indices,
                                        double alpha, std::uint64_t seed) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  SamplingMask mask;
  mask.keep.assign(n, false);
  for (auto i : indices) {
    if (i >= n) throw InvalidDimension("mask index out of range");
    mask.keep[i] = true;
  }
  mask.indices = std::move(indices);
  mask.alpha = alpha;
  mask.seed = seed;
  return mask;
}

Diffuser make_diffuser(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidDimension("diffuser length must be >= 1");
  Rng rng(seed);
  Diffuser d;
  d.seed = seed;
  d.signs.resize(n);
  for (auto& s : d.signs) s = rng.coin() ? std::int8_t{-1} : std::int8_t{1};
  return d;
}

SamplingMask make_mask(std::size_t n, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidParameter("sampling ratio alpha must lie in (0, 1]");
  }
  if (n == 0) throw InvalidDimension("mask length must be >= 1");
  Rng rng(seed);
  SamplingMask mask;
  mask.alpha = alpha;
  mask.seed = seed;
  mask.keep.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // uniform() < 1 always, so alpha == 1 keeps everything.
    const bool k = rng.uniform() < alpha;
    mask.keep[i] = k;
    if (k) mask.indices.push_back(i);
  }
  return mask;
}

MeasurementOperator::MeasurementOperator(std::size_t height, std::size_t width,
                                         Diffuser diffuser, SamplingMask mask)
    : height_(height),
      width_(width),
      diffuser_(std::move(diffuser)),
      mask_(std::move(mask)),
      fft_(height, width) {
  if (diffuser_.signs.size() != n() || mask_.n() != n()) {
    throw InvalidDimension("diffuser and mask lengths must equal height*width");
  }
}

MeasurementOperator MeasurementOperator::with_mask(SamplingMask mask) const {
  return MeasurementOperator(height_, width_, diffuser_, std::move(mask));
}

void MeasurementOperator::check(const ComplexImage& x) const {
  if (x.height() != height_ || x.width() != width_) {
    throw InvalidDimension("image shape does not match the measurement operator");
  }
}

ComplexImage MeasurementOperator::apply_unitary(const ComplexImage& x) const {
  check(x);
  ComplexImage out(x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * double(diffuser_.signs[i]);
  fft_.forward(out, out);
  return out;
}

ComplexImage MeasurementOperator::adjoint_unitary(const ComplexImage& z) const {
  check(z);
  ComplexImage out(z.height(), z.width());
  fft_.inverse(z, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= double(diffuser_.signs[i]);
  return out;
}

MeasurementSet measure(const MeasurementOperator& op, const ComplexImage& x, double sigma_n,
                       std::uint64_t noise_seed) {
  if (!(sigma_n >= 0.0) || !std::isfinite(sigma_n)) {
    throw InvalidParameter("noise level sigma_n must be finite and >= 0");
  }
  const ComplexImage u = op.apply_unitary(x);
  MeasurementSet meas;
  meas.indices = op.mask().indices;
  meas.sigma_n = sigma_n;
  meas.alpha = op.mask().alpha;
  meas.noise_seed = noise_seed;
  meas.y.resize(meas.indices.size());
  Rng rng(noise_seed);
  for (std::size_t i = 0; i < meas.indices.size(); ++i) {
    // The noise stream is drawn even when sigma_n == 0 so that the amplitude
    // sequence for a given seed does not depend on sigma_n.
    const double noise = rng.normal();
    meas.y[i] = std::abs(u[meas.indices[i]]) + sigma_n * noise;
  }
  return meas;
}

MeasurementSet restrict_measurements(const MeasurementSet& meas, const SamplingMask& sub_mask) {
  MeasurementSet out = meas;
  out.indices = sub_mask.indices;
  out.y.resize(sub_mask.m());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub_mask.m(); ++i) {
    const auto target = sub_mask.indices[i];
    while (j < meas.indices.size() && meas.indices[j] < target) ++j;
    if (j == meas.indices.size() || meas.indices[j] != target) {
      throw InvalidDimension("sub-mask selects an index that was not measured");
    }
    out.y[i] = meas.y[j];
  }
  return out;
}

MeasurementOperator OperatorProvenance::build_operator() const {
  const std::size_t n = height * width;
  return MeasurementOperator(height, width, make_diffuser(n, diffuser_seed),
                             make_mask(n, alpha, mask_seed));
}

std::string OperatorProvenance::to_json() const {
  nlohmann::ordered_json j;
  j["height"] = height;
  j["width"] = width;
  j["alpha"] = alpha;
  j["diffuser_seed"] = diffuser_seed;
  j["mask_seed"] = mask_seed;
  j["noise_seed"] = noise_seed;
  j["sigma_n"] = sigma_n;
  return j.dump();
}

OperatorProvenance OperatorProvenance::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  OperatorProvenance p;
  p.height = j.at("height").get<std::size_t>();
  p.width = j.at("width").get<std::size_t>();
  p.alpha = j.at("alpha").get<double>();
  p.diffuser_seed = j.at("diffuser_seed").get<std::uint64_t>();
  p.mask_seed = j.at("mask_seed").get<std::uint64_t>();
  p.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  p.sigma_n = j.at("sigma_n").get<double>();
  return p;
}

}  // namespace phaseprior
