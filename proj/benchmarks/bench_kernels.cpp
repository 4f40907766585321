#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "cmaopt/inner_cycle.hpp"
#include "cmaopt/linesearch.hpp"
#include "cmaopt/problems/mlp.hpp"
#include "cmaopt/problems/quadratic.hpp"
#include "cmaopt/solvers.hpp"

using namespace cmaopt;

namespace {

std::shared_ptr<MLPObjective> make_mlp(std::size_t layers, std::size_t neurons, std::size_t samples,
                                       std::size_t batch) {
  const MLPArchitecture arch{layers, neurons, 8, 1};
  auto data = std::make_shared<Dataset>(synth_data(samples, 8, 1, 3));
  return std::make_shared<MLPObjective>(arch, data, 1e-6, batch);
}

}  // namespace

// One epoch of the inner cycle over a 500-sample MLP, by batch size.
static void BM_InnerCycleMlp(benchmark::State& state) {
  const auto f = make_mlp(1, 50, 500, static_cast<std::size_t>(state.range(0)));
  const ParameterVector w = init_weights(f->architecture(), 1);
  const Permutation perm = make_permutation({}, f->num_components(), 0);
  for (auto _ : state) {
    Evaluator eval(*f);
    auto r = inner_cycle(eval, w, 1e-3, perm);
    benchmark::DoNotOptimize(r.w_trial.data());
  }
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_InnerCycleMlp)->Arg(1)->Arg(10)->Arg(50);

static void BM_FullValueMlp(benchmark::State& state) {
  const auto f = make_mlp(static_cast<std::size_t>(state.range(0)), 20, 500, 50);
  const ParameterVector w = init_weights(f->architecture(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(f->value(w));
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_FullValueMlp)->Arg(1)->Arg(3);

static void BM_InnerCycleQuadratic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = quadratic_make(n, 20, 1);
  const ParameterVector w = random_point(n, 2);
  const Permutation perm = make_permutation({}, 20, 0);
  for (auto _ : state) {
    Evaluator eval(q);
    auto r = inner_cycle(eval, w, 1e-2, perm);
    benchmark::DoNotOptimize(r.w_trial.data());
  }
}
BENCHMARK(BM_InnerCycleQuadratic)->Arg(10)->Arg(100);

// Extrapolating linesearch on a quadratic where the optimal step is about
// 2^k times zeta, so the probe count grows with k.
static void BM_Edfl(benchmark::State& state) {
  const auto q = quadratic_make(10, 5, 4);
  const ParameterVector w = random_point(10, 5);
  const ParameterVector d = -q.gradient(w);
  const double zeta = std::ldexp(1e-2, -static_cast<int>(state.range(0)));
  const ValueFn f = [&](const ParameterVector& x) { return q.value(x); };
  const double fw = q.value(w);
  int probes = 0;
  for (auto _ : state) {
    const auto out = edfl(f, w, d, zeta, {}, fw);
    probes = out.probes;
    benchmark::DoNotOptimize(out.alpha);
  }
  state.counters["probes"] = probes;
}
BENCHMARK(BM_Edfl)->Arg(0)->Arg(8)->Arg(16);

static void BM_CmaEpoch(benchmark::State& state) {
  const auto f = make_mlp(3, 20, 500, 10);
  SolverConfig cfg;
  SolverState s(*f, init_weights(f->architecture(), 7), cfg.zeta0, cfg.memory);
  s.set_initial_value(s.eval.full_value(s.w));
  for (auto _ : state) cma_iterate(s, cfg);
  state.counters["full_evals_per_epoch"] = benchmark::Counter(
      static_cast<double>(s.eval.counters().full_value_evals), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_CmaEpoch);

BENCHMARK_MAIN();
