// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include "tuckersim/jacobi_svd.hpp"
#include "tuckersim/rng.hpp"

namespace {

using namespace tuckersim;

Matrix<double> random_rows(index_t rows, index_t cols, std::uint64_t seed) {
    Matrix<double> b(rows, cols);
    GaussianSampler g(seed);
    for (index_t i = 0; i < rows; ++i) {
        for (index_t j = 0; j < cols; ++j) b.at(i, j) = g.normal();
    }
    return b;
}

void BM_JacobiCold(benchmark::State& state) {
    const auto n = static_cast<index_t>(state.range(0));
    const auto b = random_rows(n, 4 * n, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobi_sweeps(b));
    }
}
BENCHMARK(BM_JacobiCold)->Arg(8)->Arg(16)->Arg(32);

void BM_JacobiWarmSweep(benchmark::State& state) {
    const auto n = static_cast<index_t>(state.range(0));
    const auto b = random_rows(n, 4 * n, 1);
    const auto converged = jacobi_sweeps(b);
    JacobiOptions warm;
    warm.max_sweeps = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(jacobi_sweeps(converged.b, converged.w, warm));
    }
}
BENCHMARK(BM_JacobiWarmSweep)->Arg(8)->Arg(16)->Arg(32);

void BM_JacobiFixed(benchmark::State& state) {
    const auto n = static_cast<index_t>(state.range(0));
    const auto bd = random_rows(n, 4 * n, 1);
    const FxProfile profile;
    DenseTensor<FxValue> t(TensorShape({n, 4 * n}));
    for (index_t i = 1; i <= n; ++i) {
        for (index_t j = 1; j <= 4 * n; ++j) {
            t.at(i, j) = quantize(bd.at(i - 1, j - 1) / 16.0, profile.tensor_fmt);
        }
    }
    const auto u = unfold(t, 1);
    for (auto _ : state) {
        FxStats stats;
        auto b0 = fx_load_matrix(u, profile.matrix_fmt, &stats);
        benchmark::DoNotOptimize(jacobi_sweeps(std::move(b0), FxJacobiOptions{}, &stats));
    }
}
BENCHMARK(BM_JacobiFixed)->Arg(8)->Arg(16);

}  // namespace
