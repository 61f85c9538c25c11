#include <cmath>
#include <sstream>

#include "phaseprior/prox.hpp"
#include "phaseprior/solvers.hpp"
#include "solver_util.hpp"

namespace phaseprior {

PnpConfig PnpConfig::for_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must lie in (0, 1]");
  PnpConfig c;
  c.sigma_K = 1.0 / (1000.0 * alpha);
  return c;
}

void PnpConfig::validate() const {
  if (K < 1) throw InvalidParameter("PnP step count K must be >= 1");
  if (!(lambda > 0.0)) throw InvalidParameter("PnP lambda must be > 0");
  if (sigma_n && !(*sigma_n >= 0.0)) throw InvalidParameter("sigma_n must be >= 0");
  if (!(sigma_n_floor > 0.0)) throw InvalidParameter("sigma_n floor must be > 0");
  if (!(sigma_K > 0.0) || !(sigma_0 >= sigma_K)) {
    throw InvalidParameter("PnP schedule needs sigma_0 >= sigma_K > 0");
  }
}

double noise_schedule(const PnpConfig& cfg, std::size_t k) {
  if (k > cfg.K) throw InvalidParameter("noise schedule index outside [0, K]");
  if (k == 0) return cfg.sigma_0;
  const double fraction = static_cast<double>(k) / static_cast<double>(cfg.K);
  return cfg.sigma_0 * std::pow(cfg.sigma_K / cfg.sigma_0, fraction);
}

SolverResult pnp(const MeasurementOperator& op, const MeasurementSet& meas,
                 const Denoiser& denoiser, const PnpConfig& cfg, const ComplexImage& x0) {
  cfg.validate();
  require_same_shape(x0, ComplexImage(op.height(), op.width()),
                     "initial iterate does not match the operator grid");
  detail::Stopwatch clock;
  const double sigma_n = detail::effective_sigma_n(cfg.sigma_n, meas.sigma_n, cfg.sigma_n_floor);

  RunTrace trace;
  ComplexImage x = x0;
  for (std::size_t k = 0; k < cfg.K; ++k) {
    const double sigma_k = noise_schedule(cfg, k);
    const double beta = cfg.lambda * sigma_n * sigma_n / (sigma_k * sigma_k);

    ComplexImage denoised;
    try {
      denoised = denoise_split(denoiser, x, sigma_k);
    } catch (const BridgeError& e) {
      throw BridgeError(e.what(), static_cast<long>(k));
    } catch (const std::exception& e) {
      throw BridgeError(std::string("denoiser '") + denoiser.name() + "' failed: " + e.what(),
                        static_cast<long>(k));
    }
    ComplexImage x_next = data_prox(op, denoised, meas, 1.0 / beta);

    IterationRecord rec;
    rec.iteration = k + 1;
    rec.r = detail::relative_change(x_next, x);
    rec.sigma = sigma_k;
    trace.records.push_back(rec);
    x = std::move(x_next);

    if (!all_finite(x)) {
      std::ostringstream os;
      os << "PnP produced a non-finite iterate at step " << k + 1;
      throw DivergenceError(os.str(), std::move(trace));
    }
  }
  StageInfo info;
  info.sigma = noise_schedule(cfg, cfg.K);
  info.sampled = meas.m();
  info.iterations = cfg.K;
  trace.stages.push_back(info);
  trace.wall_ms = clock.elapsed_ms();
  return {std::move(x), std::move(trace)};
}

}  // namespace phaseprior
