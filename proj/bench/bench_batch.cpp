#include <benchmark/benchmark.h>

#include "mlp/bounds.hpp"
#include "mlp/estimator.hpp"

namespace {

mlp::PdeProblem problem(int d) {
    return mlp::make_problem(d, 0.5, mlp::Orientation::Forward, mlp::allen_cahn(), mlp::gaussian_bump_datum(1.0));
}

mlp::MlpParams params(int n) {
    mlp::MlpParams p;
    p.levels = n;
    p.branching = n;
    p.truncation_radius = 3.6867;
    p.seed = 1;
    return p;
}

void BM_BatchSerial(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const auto p = problem(d);
    const mlp::Point x(static_cast<std::size_t>(d), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(mlp::estimate_batch_serial(p, params(n), 0.5, x, 32));
    state.SetItemsProcessed(state.iterations() * 32);
}

void BM_BatchParallel(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    const auto p = problem(d);
    const mlp::Point x(static_cast<std::size_t>(d), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(mlp::estimate_batch(p, params(n), 0.5, x, 32, 0));
    state.SetItemsProcessed(state.iterations() * 32);
}

void BM_CostRecursion(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(mlp::cost_recursion(100, 6, 6));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Args({1, 3})->Args({10, 4})->Args({100, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Args({1, 3})->Args({10, 4})->Args({100, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostRecursion);

BENCHMARK_MAIN();
