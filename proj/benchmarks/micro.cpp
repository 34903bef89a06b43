#include <benchmark/benchmark.h>

#include "hipnex/ergodic.hpp"
#include "hipnex/problems.hpp"
#include "hipnex/rng.hpp"
#include "hipnex/solver.hpp"
#include "hipnex/subproblem.hpp"

using namespace hipnex;

namespace {

void BM_SubproblemDirect(benchmark::State& state) {
  const auto cm = gen_cubic_minmax({static_cast<int>(state.range(0)), 0, 1e-3, 20.0});
  Rng rng(1);
  Evaluator eval(cm.problem);
  const auto inst = SubproblemInstance::make(eval, 50.0, rng.normal_vector(cm.problem.dim),
                                             rng.normal_vector(cm.problem.dim));
  for (auto _ : state) benchmark::DoNotOptimize(solve_direct(eval, inst));
}
BENCHMARK(BM_SubproblemDirect)->Arg(50)->Arg(200);

void BM_SubproblemKrylov(benchmark::State& state) {
  const auto cm = gen_cubic_minmax({static_cast<int>(state.range(0)), 0, 1e-3, 20.0});
  Rng rng(1);
  Evaluator eval(cm.problem);
  const auto inst = SubproblemInstance::make(eval, 50.0, rng.normal_vector(cm.problem.dim),
                                             rng.normal_vector(cm.problem.dim));
  for (auto _ : state) benchmark::DoNotOptimize(solve_krylov(eval, inst, 0.25, 20000));
}
BENCHMARK(BM_SubproblemKrylov)->Arg(50)->Arg(200);

void BM_SubproblemTseng(benchmark::State& state) {
  const auto bp = gen_box({static_cast<int>(state.range(0)), 0});
  Rng rng(2);
  Evaluator eval(bp.problem);
  const auto inst = SubproblemInstance::make(eval, 2.0, bp.problem.projected(rng.normal_vector(bp.problem.dim)),
                                             rng.normal_vector(bp.problem.dim));
  for (auto _ : state) benchmark::DoNotOptimize(solve_tseng(eval, inst, 0.25));
}
BENCHMARK(BM_SubproblemTseng)->Arg(20)->Arg(100);

void BM_ErgodicIngest(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const Vector y = rng.normal_vector(n);
  const Vector w = rng.normal_vector(n);
  ErgodicAccumulator acc;
  for (auto _ : state) acc.ingest(1.5, y, w);
  benchmark::DoNotOptimize(acc.certificate());
}
BENCHMARK(BM_ErgodicIngest)->Arg(100)->Arg(400);

void BM_SolveCubic(benchmark::State& state) {
  const auto cm = gen_cubic_minmax({static_cast<int>(state.range(0)), 0, 1e-3, 20.0});
  RunOptions opt;
  opt.subproblem.backend = Backend::Krylov;
  opt.strict = false;
  const Vector x0 = Rng(4).normal_vector(cm.problem.dim);
  const Params p = derive_params(0.25, cm.L);
  for (auto _ : state) benchmark::DoNotOptimize(run(cm.problem, p, x0, opt));
}
BENCHMARK(BM_SolveCubic)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
