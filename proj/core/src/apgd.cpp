#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "phaseprior/prox.hpp"
#include "phaseprior/random.hpp"
#include "phaseprior/solvers.hpp"
#include "solver_util.hpp"

namespace phaseprior {

std::size_t RunTrace::restarts() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.restart; }));
}

std::string RunTrace::to_json_lines() const {
  std::string out;
  for (const auto& rec : records) {
    nlohmann::ordered_json j;
    j["iteration"] = rec.iteration;
    j["stage"] = rec.stage;
    j["r"] = rec.r;
    j["s"] = rec.s;
    j["sigma"] = rec.sigma;
    j["restart"] = rec.restart;
    j["t"] = rec.t;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void ApgdConfig::validate() const {
  if (gamma && !(*gamma > 0.0)) throw InvalidParameter("APGD step gamma must be > 0");
  if (!(epsilon > 0.0)) throw InvalidParameter("APGD tolerance epsilon must be > 0");
  if (!(lambda >= 0.0)) throw InvalidParameter("APGD lambda must be >= 0");
  if (sigma_n && !(*sigma_n >= 0.0)) throw InvalidParameter("sigma_n must be >= 0");
  if (!(sigma_n_floor > 0.0)) throw InvalidParameter("sigma_n floor must be > 0");
  if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
}

double next_momentum(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

namespace {

SolverResult run_apgd(const MeasurementOperator& op, const MeasurementSet& meas,
                      const ComplexSplitRegularizer& reg, const ApgdConfig& cfg,
                      const ComplexImage& x0, std::size_t stage, RunTrace trace) {
  cfg.validate();
  require_same_shape(x0, ComplexImage(op.height(), op.width()),
                     "initial iterate does not match the operator grid");

  const double sigma_n = detail::effective_sigma_n(cfg.sigma_n, meas.sigma_n, cfg.sigma_n_floor);
  const double gamma =
      cfg.gamma ? *cfg.gamma : 1.0 / (std::max(cfg.lambda, 1e-300) * reg.lipschitz_bound().L);
  const double grad_step = gamma * cfg.lambda;
  const double prox_weight = gamma / sigma_n;
  const double sigma = reg.base().sigma();

  ComplexImage x = x0;
  ComplexImage z = x0;
  ComplexImage w(x0.height(), x0.width());
  double t = 1.0;
  double s = std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  const std::size_t first_record = trace.records.size();

  while (r > cfg.epsilon && k < cfg.max_iters) {
    const auto eval = reg.evaluate(z);
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] - grad_step * eval.gradient[i];
    ComplexImage x_next = data_prox(op, w, meas, prox_weight);

    double s_next = eval.value;
    if (cfg.full_objective_restart) {
      s_next = data_fidelity(op, z, meas) / sigma_n + cfg.lambda * eval.value;
    }
    double t_next = next_momentum(t);
    const double beta = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x_next[i] + beta * (x_next[i] - x[i]);

    const bool restart = s_next > s;
    if (restart) {
      z = x_next;
      t_next = 1.0;
    }
    r = detail::relative_change(x_next, x);

    IterationRecord rec;
    rec.iteration = k + 1;
    rec.r = r;
    rec.s = s_next;
    rec.sigma = sigma;
    rec.restart = restart;
    rec.t = t_next;
    rec.stage = stage;
    double gap = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) gap += std::norm(z[i] - x_next[i]);
    rec.momentum_gap = std::sqrt(gap);
    trace.records.push_back(rec);

    x = std::move(x_next);
    t = t_next;
    s = s_next;
    ++k;

    if (!all_finite(x) || !std::isfinite(r)) {
      std::ostringstream os;
      os << "APGD produced a non-finite iterate at iteration " << k;
      throw DivergenceError(os.str(), std::move(trace));
    }
  }

  StageInfo info;
  info.sigma = sigma;
  info.sampled = meas.m();
  info.iterations = trace.records.size() - first_record;
  info.hit_max_iters = r > cfg.epsilon;
  trace.stages.push_back(info);
  trace.hit_max_iters = trace.hit_max_iters || info.hit_max_iters;
  return {std::move(x), std::move(trace)};
}

}  // namespace

SolverResult apgd_restart(const MeasurementOperator& op, const MeasurementSet& meas,
                          const ComplexSplitRegularizer& reg, const ApgdConfig& cfg,
                          const ComplexImage& x0) {
  detail::Stopwatch clock;
  auto result = run_apgd(op, meas, reg, cfg, x0, 0, RunTrace{});
  result.trace.wall_ms = clock.elapsed_ms();
  return result;
}

SamplingMask quarter_subsample(const SamplingMask& mask, std::uint64_t seed) {
  std::vector<std::size_t> pool = mask.indices;
  const std::size_t keep = pool.size() / 4;
  Rng rng(seed);
  // Partial Fisher-Yates: the first `keep` slots become a uniform sample.
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(keep);
  return SamplingMask::from_indices(mask.n(), std::move(pool), mask.alpha, seed);
}

SolverResult continuation(const MeasurementOperator& op, const MeasurementSet& meas,
                          const ComplexSplitRegularizer& family, const ApgdConfig& cfg,
                          std::uint64_t seed) {
  detail::Stopwatch clock;
  const std::uint64_t init_seed = derive_seed(seed, 0);
  const std::uint64_t subsample_seed = derive_seed(seed, 1);

  ComplexImage x = complex_gaussian(op.height(), op.width(), init_seed);
  RunTrace trace;
  std::size_t stage = 0;
  for (const double sigma : kContinuationSigmas) {
    const auto reg = family.at_sigma(sigma);
    if (stage == 0 && meas.alpha > 0.25) {
      const auto full = SamplingMask::from_indices(op.n(), meas.indices, meas.alpha, 0);
      const auto sub = quarter_subsample(full, subsample_seed);
      const auto sub_meas = restrict_measurements(meas, sub);
      auto result = run_apgd(op, sub_meas, reg, cfg, x, stage, std::move(trace));
      x = std::move(result.x);
      trace = std::move(result.trace);
      trace.stages.back().subsample_seed = subsample_seed;
    } else {
      auto result = run_apgd(op, meas, reg, cfg, x, stage, std::move(trace));
      x = std::move(result.x);
      trace = std::move(result.trace);
    }
    ++stage;
  }
  trace.wall_ms = clock.elapsed_ms();
  return {std::move(x), std::move(trace)};
}

}  // namespace phaseprior
