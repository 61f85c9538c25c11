#include <benchmark/benchmark.h>

#include <memory>

#include "phaseprior/denoiser.hpp"
#include "phaseprior/prox.hpp"
#include "phaseprior/random.hpp"
#include "phaseprior/regularizers.hpp"
#include "phaseprior/solvers.hpp"

using namespace phaseprior;

namespace {

struct Problem {
  MeasurementOperator op;
  MeasurementSet meas;
  ComplexImage x;

  Problem(std::size_t n, double alpha)
      : op(n, n, make_diffuser(n * n, 1), make_mask(n * n, alpha, 2)),
        meas(measure(op, complex_gaussian(n, n, 3), 0.0, 4)),
        x(complex_gaussian(n, n, 5)) {}
};

void BM_ApplyUnitary(benchmark::State& state) {
  const Problem p(std::size_t(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(p.op.apply_unitary(p.x));
  state.SetItemsProcessed(state.iterations() * std::int64_t(p.x.size()));
}

void BM_DataProx(benchmark::State& state) {
  const Problem p(std::size_t(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(data_prox(p.op, p.x, p.meas, 1e-3));
  state.SetItemsProcessed(state.iterations() * std::int64_t(p.x.size()));
}

void BM_TvGrad(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  RealPlane plane(n, n);
  const auto x = complex_gaussian(n, n, 7);
  for (std::size_t i = 0; i < plane.size(); ++i) plane[i] = x[i].real();
  for (auto _ : state) benchmark::DoNotOptimize(tv_grad(plane, kDefaultHuberEps));
  state.SetItemsProcessed(state.iterations() * std::int64_t(plane.size()));
}

void BM_SplitGrad(benchmark::State& state) {
  const Problem p(std::size_t(state.range(0)), 1.0);
  const ComplexSplitRegularizer reg(std::make_shared<SmoothedTv>());
  for (auto _ : state) benchmark::DoNotOptimize(split_grad(reg, p.x));
  state.SetItemsProcessed(state.iterations() * std::int64_t(p.x.size()));
}

// Fixed iteration budget; items are solver iterations.
void BM_ApgdIterations(benchmark::State& state) {
  const Problem p(std::size_t(state.range(0)), 0.5);
  const ComplexSplitRegularizer reg(std::make_shared<SmoothedTv>());
  ApgdConfig cfg;
  cfg.max_iters = 50;
  cfg.epsilon = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(apgd_restart(p.op, p.meas, reg, cfg, p.x));
  state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.max_iters));
}

void BM_PnpSteps(benchmark::State& state) {
  const Problem p(std::size_t(state.range(0)), 0.5);
  const GaussianDenoiser den;
  PnpConfig cfg = PnpConfig::for_alpha(0.5);
  cfg.K = 50;
  for (auto _ : state) benchmark::DoNotOptimize(pnp(p.op, p.meas, den, cfg, p.x));
  state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.K));
}

}  // namespace

BENCHMARK(BM_ApplyUnitary)->Arg(32)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_DataProx)->Arg(64)->Arg(128);
BENCHMARK(BM_TvGrad)->Arg(64)->Arg(128);
BENCHMARK(BM_SplitGrad)->Arg(64)->Arg(128);
BENCHMARK(BM_ApgdIterations)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PnpSteps)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
