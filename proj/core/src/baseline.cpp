#include <sstream>

#include "phaseprior/prox.hpp"
#include "phaseprior/solvers.hpp"
#include "solver_util.hpp"

namespace phaseprior {

void GdConfig::validate() const {
  if (!(step > 0.0)) throw InvalidParameter("gradient step must be > 0");
  if (!(epsilon > 0.0)) throw InvalidParameter("tolerance epsilon must be > 0");
  if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
}

SolverResult plain_gd(const MeasurementOperator& op, const MeasurementSet& meas,
                      const GdConfig& cfg, const ComplexImage& x0) {
  cfg.validate();
  require_same_shape(x0, ComplexImage(op.height(), op.width()),
                     "initial iterate does not match the operator grid");
  detail::Stopwatch clock;

  RunTrace trace;
  ComplexImage x = x0;
  double r = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  while (r > cfg.epsilon && k < cfg.max_iters) {
    const ComplexImage g = data_gradient(op, x, meas);
    ComplexImage x_next = x;
    for (std::size_t i = 0; i < x.size(); ++i) x_next[i] -= cfg.step * g[i];
    r = detail::relative_change(x_next, x);

    IterationRecord rec;
    rec.iteration = k + 1;
    rec.r = r;
    trace.records.push_back(rec);
    x = std::move(x_next);
    ++k;

    if (!all_finite(x) || !std::isfinite(r)) {
      std::ostringstream os;
      os << "gradient descent produced a non-finite iterate at iteration " << k;
      throw DivergenceError(os.str(), std::move(trace));
    }
  }
  StageInfo info;
  info.sampled = meas.m();
  info.iterations = k;
  info.hit_max_iters = r > cfg.epsilon;
  trace.stages.push_back(info);
  trace.hit_max_iters = info.hit_max_iters;
  trace.wall_ms = clock.elapsed_ms();
  return {std::move(x), std::move(trace)};
}

}  // namespace phaseprior
