// Serial vs OpenMP propagation kernels. Args: age cells, time steps.
#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "vintage/kernels.hpp"
#include "vintage/model.hpp"

using namespace vintage;

namespace {

struct Workload {
    std::size_t n;
    std::size_t steps;
    StepCoefficients coeff;
    std::vector<double> controls;
    std::vector<double> rows;
    std::vector<double> alpha;
    std::vector<double> weight;

    Workload(std::size_t n_cells, std::size_t n_steps)
        : n(n_cells), steps(n_steps), coeff(StepCoefficients::make(0.1, 1.0 / n_cells)),
          controls(n_steps * (n_cells + 1)), rows((n_steps + 1) * n_cells, 0.0), alpha(n_cells),
          weight(n_steps) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (double& v : controls) v = uni(rng);
        for (std::size_t j = 0; j < n; ++j) {
            rows[j] = 1.0;
            alpha[j] = std::exp(-0.5 * static_cast<double>(j) / n);
        }
        for (std::size_t k = 0; k < steps; ++k) weight[k] = std::exp(-static_cast<double>(k) / n);
    }
};

template <bool Parallel>
void forward(benchmark::State& state) {
    Workload w(state.range(0), state.range(1));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::forward_parallel(w.controls, w.coeff, w.n, w.steps, w.rows);
        else
            kernels::forward_serial(w.controls, w.coeff, w.n, w.steps, w.rows);
        benchmark::DoNotOptimize(w.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.n * w.steps));
    state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

template <bool Parallel>
void adjoint(benchmark::State& state) {
    Workload w(state.range(0), state.range(1));
    for (auto _ : state) {
        if constexpr (Parallel)
            kernels::adjoint_parallel(w.weight, w.alpha, w.coeff.decay, w.n, w.steps, w.rows);
        else
            kernels::adjoint_serial(w.weight, w.alpha, w.coeff.decay, w.n, w.steps, w.rows);
        benchmark::DoNotOptimize(w.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.n * w.steps));
    state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

void sizes(benchmark::internal::Benchmark* b) {
    b->Args({200, 400})->Args({200, 4000})->Args({800, 1600})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(forward<false>)->Name("forward/serial")->Apply(sizes);
BENCHMARK(forward<true>)->Name("forward/parallel")->Apply(sizes);
BENCHMARK(adjoint<false>)->Name("adjoint/serial")->Apply(sizes);
BENCHMARK(adjoint<true>)->Name("adjoint/parallel")->Apply(sizes);

BENCHMARK_MAIN();
