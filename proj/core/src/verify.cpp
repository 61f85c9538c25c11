#include "phaseprior/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "phaseprior/metrics.hpp"
#include "phaseprior/prox.hpp"
#include "phaseprior/random.hpp"
#include "phaseprior/regularizers.hpp"
#include "phaseprior/solvers.hpp"

namespace phaseprior {

namespace {

std::string sci(const char* label, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
  return buf;
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    auto r = body();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

CheckResult unitarity(std::uint64_t seed) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t h = 4 + 7 * std::size_t(trial), w = 3 + 5 * std::size_t(trial);
    const auto op = MeasurementOperator(h, w, make_diffuser(h * w, seed + trial),
                                        make_mask(h * w, 1.0, seed + trial));
    const auto x = complex_gaussian(h, w, derive_seed(seed, 10 + trial));
    const auto z = complex_gaussian(h, w, derive_seed(seed, 50 + trial));
    const auto ux = op.apply_unitary(x);
    worst = std::max(worst, std::abs(norm(ux) - norm(x)) / norm(x));
    const Complex lhs = inner(ux, z);
    const Complex rhs = inner(x, op.adjoint_unitary(z));
    worst = std::max(worst, std::abs(lhs - rhs) / (norm(x) * norm(z)));
  }
  return {"", worst < 1e-10, sci("max relative error", worst)};
}

// Compares scalar_prox against a dense scan along the ray through x; the
// optimal point always shares x's phase.
CheckResult scalar_prox_scan(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 2));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Complex x(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
    const double y = 3 * rng.uniform() - 0.5;
    const double lambda = std::exp(6 * rng.uniform() - 3);
    const auto objective = [&](double r) {
      return 0.5 * (r - std::abs(x)) * (r - std::abs(x)) + 0.5 * lambda * (r - y) * (r - y);
    };
    double lo = 0.0, hi = std::abs(x) + std::abs(y) + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
      if (objective(a) < objective(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    const double r = 0.5 * (lo + hi);
    const Complex expected = std::abs(x) > 0 ? std::polar(r, std::arg(x)) : Complex(r, 0.0);
    worst = std::max(worst, std::abs(scalar_prox(x, y, lambda) - expected));
  }
  return {"", worst < 1e-6, sci("max deviation", worst)};
}

CheckResult data_prox_optimality(std::uint64_t seed) {
  const std::size_t h = 8, w = 8;
  const auto op = MeasurementOperator(h, w, make_diffuser(h * w, seed), make_mask(h * w, 0.6, seed));
  const auto truth = complex_gaussian(h, w, derive_seed(seed, 3));
  const auto meas = measure(op, truth, 0.05, derive_seed(seed, 4));
  const auto x = complex_gaussian(h, w, derive_seed(seed, 5));
  const double lambda = 0.7;
  const auto p = data_prox(op, x, meas, lambda);
  const auto objective = [&](const ComplexImage& z) {
    ComplexImage d = z;
    for (std::size_t i = 0; i < d.size(); ++i) d.storage()[i] -= x.storage()[i];
    return 0.5 * squared_norm(d) + lambda * data_fidelity(op, z, meas);
  };
  const double best = objective(p);
  double worst_gain = 0.0;
  Rng rng(derive_seed(seed, 6));
  for (int trial = 0; trial < 100; ++trial) {
    ComplexImage q = p;
    for (auto& v : q.storage()) v += Complex(rng.normal(), rng.normal()) * 1e-3;
    worst_gain = std::max(worst_gain, best - objective(q));
  }
  return {"", worst_gain <= 1e-12, sci("largest improvement by perturbation", worst_gain)};
}

CheckResult tv_gradient(std::uint64_t seed) {
  const auto report = check_plugin_conformance(SmoothedTv(), 9, 7, seed, 10);
  return {"", report.passed, sci("worst relative FD error", report.worst_relative_error)};
}

CheckResult split_gradient(std::uint64_t seed) {
  const ComplexSplitRegularizer reg(std::make_shared<SmoothedTv>(0.5), 0.05);
  const std::size_t h = 6, w = 5;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    // Kept away from the branch cut of arg and from the magnitude floor.
    auto x = complex_gaussian(h, w, derive_seed(seed, 100 + trial));
    for (auto& v : x.storage()) v = Complex(1.5, 1.5) + 0.3 * v;
    const auto g = reg.gradient(x);
    ComplexImage fd(h, w);
    const double step = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int part = 0; part < 2; ++part) {
        const Complex dir = part ? Complex(0, step) : Complex(step, 0);
        ComplexImage a = x, b = x;
        a.storage()[i] += dir;
        b.storage()[i] -= dir;
        const double d = (reg.value(a) - reg.value(b)) / (2 * step);
        fd.storage()[i] += part ? Complex(0, d) : Complex(d, 0);
      }
    }
    ComplexImage diff = g;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.storage()[i] -= fd.storage()[i];
    worst = std::max(worst, norm(diff) / std::max(norm(fd), 1e-12));
  }
  return {"", worst < 1e-4, sci("worst relative FD error", worst)};
}

CheckResult schedule_endpoints(std::uint64_t) {
  double worst = 0.0;
  for (double alpha : {0.1, 0.5, 1.0}) {
    const auto cfg = PnpConfig::for_alpha(alpha);
    worst = std::max(worst, std::abs(noise_schedule(cfg, 0) - cfg.sigma_0));
    worst = std::max(worst, std::abs(noise_schedule(cfg, cfg.K) - 1.0 / (1000 * alpha)));
  }
  return {"", worst < 1e-12, sci("max endpoint error", worst)};
}

CheckResult metric_phase_invariance(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 7));
  RealPlane p(12, 10);
  for (auto& v : p.storage()) v = 0.1 + 0.8 * rng.uniform();
  const auto x = encode_image(p);
  auto noisy = x;
  for (auto& v : noisy.storage()) v *= std::polar(1.0, 0.05 * rng.normal());
  const double base_psnr = psnr(p, decode_image(noisy, x));
  const double base_cos = cosine_similarity(x, noisy);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Complex rot = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
    auto turned = noisy;
    for (auto& v : turned.storage()) v *= rot;
    worst = std::max(worst, std::abs(psnr(p, decode_image(turned, x)) - base_psnr));
    worst = std::max(worst, std::abs(cosine_similarity(x, turned) - base_cos));
  }
  return {"", worst < 1e-9, sci("max metric change", worst)};
}

CheckResult encode_roundtrip(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 8));
  RealPlane p(16, 16);
  for (auto& v : p.storage()) v = rng.uniform();
  const auto back = decode_image(encode_image(p));
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, std::abs(back.storage()[i] - p.storage()[i]));
  }
  return {"", worst < 1e-12, sci("max pixel error", worst)};
}

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  return {
      guarded("operator-unitarity", [&] { return unitarity(seed); }),
      guarded("scalar-prox-optimality", [&] { return scalar_prox_scan(seed); }),
      guarded("data-prox-optimality", [&] { return data_prox_optimality(seed); }),
      guarded("tv-gradient", [&] { return tv_gradient(seed); }),
      guarded("split-gradient", [&] { return split_gradient(seed); }),
      guarded("noise-schedule-endpoints", [&] { return schedule_endpoints(seed); }),
      guarded("metric-phase-invariance", [&] { return metric_phase_invariance(seed); }),
      guarded("encode-decode-roundtrip", [&] { return encode_roundtrip(seed); }),
  };
}

}  // namespace phaseprior
