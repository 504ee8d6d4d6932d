#include "tuckersim/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "tuckersim/rng.hpp"
#include "tuckersim/ttm.hpp"

namespace tuckersim {

DenseTensor<double> synth_tensor(const SynthSpec& spec) {
    if (spec.noise_ratio < 0.0 || !std::isfinite(spec.noise_ratio)) {
        throw std::invalid_argument("synth_tensor: noise_ratio must be finite and >= 0");
    }
    const TensorShape shape(spec.dims);
    TuckerRank rank{spec.rank};
    rank.validate(shape);

    GaussianSampler rng(spec.seed);

    // Core first (flat order), then each factor column-major, then noise.
    DenseTensor<double> g{TensorShape(spec.rank)};
    for (index_t i = 0; i < g.size(); ++i) g[i] = rng.normal();

    std::vector<FactorMatrix<double>> factors;
    factors.reserve(spec.dims.size());
    for (index_t k = 1; k <= shape.order(); ++k) {
        FactorMatrix<double> a(shape.extent(k), rank.at(k));
        for (auto& v : a.storage()) v = rng.normal();
        factors.push_back(std::move(a));
    }

    DenseTensor<double> x = g;
    for (index_t k = 1; k <= shape.order(); ++k) {
        x = ttm(x, k, factors[static_cast<std::size_t>(k - 1)], /*transposed=*/false);
    }

    if (spec.noise_ratio > 0.0) {
        // Noise variance is noise_ratio times the empirical variance of the
        // signal entries.
        double mean = 0.0;
        for (index_t i = 0; i < x.size(); ++i) mean += x[i];
        mean /= static_cast<double>(x.size());
        double var = 0.0;
        for (index_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(x.size());
        const double sd = std::sqrt(spec.noise_ratio * var);
        for (index_t i = 0; i < x.size(); ++i) x[i] += sd * rng.normal();
    }
    return x;
}

}  // namespace tuckersim
