// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include <vector>

#include "tuckersim/cordic.hpp"
#include "tuckersim/fxp.hpp"
#include "tuckersim/rng.hpp"

namespace {

using namespace tuckersim;

void BM_Quantize(benchmark::State& state) {
    GaussianSampler g(1);
    std::vector<double> xs(4096);
    for (auto& x : xs) x = g.normal();
    const FxFormat fmt{16, 12};
    for (auto _ : state) {
        for (double x : xs) benchmark::DoNotOptimize(quantize(x / 8.0, fmt));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_Quantize);

void BM_FxMulAdd(benchmark::State& state) {
    const FxFormat in{16, 12};
    const FxFormat acc{48, 24};
    GaussianSampler g(1);
    std::vector<FxValue> xs(4096), ys(4096);
    for (std::size_t i = 0; i < 4096; ++i) {
        xs[i] = quantize(g.normal() / 8.0, in);
        ys[i] = quantize(g.normal() / 8.0, in);
    }
    for (auto _ : state) {
        FxStats stats;
        FxValue sum = quantize(0.0, acc);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sum = fx_add(sum, fx_mul(xs[i], ys[i], acc, &stats, FxStage::kTtmProduct), acc,
                         &stats, FxStage::kTtmAccum);
        }
        benchmark::DoNotOptimize(sum);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_FxMulAdd);

void BM_TreeReduce(benchmark::State& state) {
    const FxFormat acc{48, 24};
    GaussianSampler g(1);
    std::vector<FxValue> xs(static_cast<std::size_t>(state.range(0)));
    for (auto& x : xs) x = quantize(g.normal() / 8.0, acc);
    for (auto _ : state) {
        FxStats stats;
        benchmark::DoNotOptimize(tree_reduce(xs, acc, &stats, FxStage::kTtmAccum));
    }
}
BENCHMARK(BM_TreeReduce)->Arg(16)->Arg(64);

void BM_CordicArctan(benchmark::State& state) {
    const FxFormat scalar{32, 20};
    const auto y = quantize(0.37, scalar);
    const auto x = quantize(-0.81, scalar);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cordic_arctan(y, x, 24));
    }
}
BENCHMARK(BM_CordicArctan);

void BM_CordicSinCos(benchmark::State& state) {
    const FxFormat angle{32, 29};
    const auto theta = quantize(0.61, angle);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cordic_sincos(theta, 24));
    }
}
BENCHMARK(BM_CordicSinCos);

}  // namespace
