// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include "tuckersim/fxp.hpp"
#include "tuckersim/hw_config.hpp"
#include "tuckersim/rng.hpp"
#include "tuckersim/ttm.hpp"

namespace {

using namespace tuckersim;

DenseTensor<double> random_tensor(const TensorShape& shape, std::uint64_t seed) {
    DenseTensor<double> x(shape);
    GaussianSampler g(seed);
    for (index_t i = 0; i < x.size(); ++i) x.data()[i] = g.normal();
    return x;
}

FactorMatrix<double> random_factor(index_t rows, index_t cols, std::uint64_t seed) {
    FactorMatrix<double> a(rows, cols);
    GaussianSampler g(seed);
    for (index_t c = 0; c < cols; ++c) {
        for (index_t i = 0; i < rows; ++i) a.at(i, c) = g.normal() / 8.0;
    }
    return a;
}

void BM_TtmReal(benchmark::State& state) {
    const auto mode = static_cast<index_t>(state.range(0));
    const auto x = random_tensor(TensorShape({32, 32, 32}), 1);
    const auto a = random_factor(32, 8, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ttm(x, mode, a, /*transposed=*/true));
    }
    state.SetItemsProcessed(state.iterations() * x.size() * 8);
}
BENCHMARK(BM_TtmReal)->Arg(1)->Arg(2)->Arg(3);

void BM_TtmTiledFixed(benchmark::State& state) {
    const auto mode = static_cast<index_t>(state.range(0));
    const FxProfile profile;
    const auto xd = random_tensor(TensorShape({32, 32, 32}), 1);
    DenseTensor<FxValue> x(xd.shape());
    for (index_t i = 0; i < x.size(); ++i) {
        x.data()[i] = quantize(xd.data()[i] / 8.0, profile.tensor_fmt);
    }
    const auto ad = random_factor(32, 8, 2);
    FactorMatrix<FxValue> a(32, 8);
    for (index_t c = 0; c < 8; ++c) {
        for (index_t i = 0; i < 32; ++i) a.at(i, c) = quantize(ad.at(i, c), profile.matrix_fmt);
    }
    HwConfig cfg;
    for (auto _ : state) {
        FxStats stats;
        benchmark::DoNotOptimize(ttm_tiled(x, mode, a, /*transposed=*/true, cfg, profile, &stats));
    }
    state.SetItemsProcessed(state.iterations() * x.size() * 8);
}
BENCHMARK(BM_TtmTiledFixed)->Arg(1)->Arg(2)->Arg(3);

}  // namespace
