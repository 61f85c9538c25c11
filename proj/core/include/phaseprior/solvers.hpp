#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseprior/denoiser.hpp"
#include "phaseprior/error.hpp"
#include "phaseprior/grid.hpp"
#include "phaseprior/measurement.hpp"
#include "phaseprior/regularizers.hpp"

namespace phaseprior {

/// Noiseless runs make 1/sigma_n undefined; the solvers use
/// max(sigma_n, floor) instead.
inline constexpr double kDefaultSigmaNFloor = 1e-4;

struct IterationRecord {
  std::size_t iteration = 0;  // k + 1 for the update producing x_{k+1}
  double r = 0.0;             // ||x_{k+1} - x_k|| / ||x_{k+1}||
  double s = 0.0;             // monitored value (APGD) or 0 (PnP, GD)
  double sigma = 0.0;         // regularizer sigma (APGD) or sigma_k (PnP)
  bool restart = false;
  double t = 1.0;             // t_{k+1} after the restart test
  double momentum_gap = 0.0;  // ||z_{k+1} - x_{k+1}||
  std::size_t stage = 0;      // continuation stage
};

struct StageInfo {
  double sigma = 0.0;
  std::size_t sampled = 0;  // measurements used in this stage
  std::optional<std::uint64_t> subsample_seed;
  std::size_t iterations = 0;
  bool hit_max_iters = false;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  std::vector<StageInfo> stages;
  double wall_ms = 0.0;
  bool hit_max_iters = false;

  std::size_t iterations() const { return records.size(); }
  std::size_t restarts() const;
  /// One JSON object per iteration, newline-terminated.
  std::string to_json_lines() const;
};

/// Non-finite iterate; carries the trace up to the failure.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, RunTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const RunTrace& trace() const { return trace_; }

 private:
  RunTrace trace_;
};

struct SolverResult {
  ComplexImage x;
  RunTrace trace;
};

// ---------------------------------------------------------------------------
// Accelerated proximal gradient descent with restart.
//
// Minimizes f(x)/sigma_n + lambda R(x):
//   x_{k+1} = prox_{gamma f / sigma_n}(z_k - gamma lambda grad R(z_k))
//   s_{k+1} = R(z_k)
//   t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
//   z_{k+1} = x_{k+1} + (t_k - 1)/t_{k+1} (x_{k+1} - x_k)
//   if s_{k+1} > s_k: z_{k+1} = x_{k+1}, t_{k+1} = 1
//   r_{k+1} = ||x_{k+1} - x_k|| / ||x_{k+1}||
// until r <= epsilon, starting from t_0 = 1, s_0 = r_0 = inf, z_0 = x_0.
// ---------------------------------------------------------------------------

struct ApgdConfig {
  /// Step size; defaults to 1 / (lambda L), L the regularizer's Lipschitz bound.
  std::optional<double> gamma;
  double epsilon = 1e-5;
  double lambda = 1e3;
  /// Overrides the measurement set's sigma_n when present.
  std::optional<double> sigma_n;
  double sigma_n_floor = kDefaultSigmaNFloor;
  std::size_t max_iters = 20000;
  /// Monitor f/sigma_n + lambda R instead of R alone in the restart test.
  bool full_objective_restart = false;

  static ApgdConfig for_tv() { return {}; }
  static ApgdConfig for_plugin() {
    ApgdConfig c;
    c.lambda = 1e4;
    return c;
  }
  void validate() const;
};

/// One step of the t-recurrence.
double next_momentum(double t);

SolverResult apgd_restart(const MeasurementOperator& op, const MeasurementSet& meas,
                          const ComplexSplitRegularizer& reg, const ApgdConfig& cfg,
                          const ComplexImage& x0);

/// Three warm-started APGD runs at sigma = 1, 1/4, 1/16. The first starts
/// from CN(0, I) drawn from seed; when alpha > 0.25 it sees only a uniformly
/// chosen quarter of the sampled entries.
SolverResult continuation(const MeasurementOperator& op, const MeasurementSet& meas,
                          const ComplexSplitRegularizer& family, const ApgdConfig& cfg,
                          std::uint64_t seed);

inline constexpr double kContinuationSigmas[] = {1.0, 0.25, 0.0625};

/// floor(m/4) of mask's entries chosen uniformly without replacement.
SamplingMask quarter_subsample(const SamplingMask& mask, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Plug-and-play: x_{k+1} = prox_{f/beta}(D_{sigma_k}(x_k)),
// beta = lambda sigma_n^2 / sigma_k^2, sigma_k geometric from sigma_0 to sigma_K.
// ---------------------------------------------------------------------------

struct PnpConfig {
  std::size_t K = 1000;
  double lambda = 0.23;
  std::optional<double> sigma_n;
  double sigma_n_floor = kDefaultSigmaNFloor;
  double sigma_0 = 1.0;
  double sigma_K = 1e-3;

  /// sigma_K = 1 / (1000 alpha).
  static PnpConfig for_alpha(double alpha);
  void validate() const;
};

/// sigma_k = sigma_0 (sigma_K / sigma_0)^(k/K), 0 <= k <= K.
double noise_schedule(const PnpConfig& cfg, std::size_t k);

SolverResult pnp(const MeasurementOperator& op, const MeasurementSet& meas,
                 const Denoiser& denoiser, const PnpConfig& cfg, const ComplexImage& x0);

// ---------------------------------------------------------------------------
// Baseline: fixed-step gradient descent on f alone.
// ---------------------------------------------------------------------------

struct GdConfig {
  double step = 1.0;
  double epsilon = 1e-5;
  std::size_t max_iters = 20000;
  void validate() const;
};

SolverResult plain_gd(const MeasurementOperator& op, const MeasurementSet& meas,
                      const GdConfig& cfg, const ComplexImage& x0);

}  // namespace phaseprior
