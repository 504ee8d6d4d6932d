// SPDX-License-Identifier: MIT
#include "tuckersim/ttm.hpp"

#include <vector>

namespace tuckersim {
namespace {

struct ContractionDims {
    index_t lead;        // prod of extents below `mode`
    index_t nk;          // extent of `mode` (contraction length)
    index_t trail;       // prod of extents above `mode`
    index_t out_extent;  // mode extent after contraction
    TensorShape out_shape;
};

template <typename T>
ContractionDims prepare(const DenseTensor<T>& x, index_t mode, index_t a_rows,
                        index_t a_cols, bool transposed) {
    x.shape().check_mode(mode);
    const index_t contract = transposed ? a_rows : a_cols;
    const index_t produce = transposed ? a_cols : a_rows;
    if (x.shape().extent(mode) != contract)
        throw std::invalid_argument(
            "ttm: mode " + std::to_string(mode) + " has extent " +
            std::to_string(x.shape().extent(mode)) + " but the factor contracts " +
            std::to_string(contract) + " elements");

    ContractionDims c;
    c.lead = x.shape().stride(mode);
    c.nk = contract;
    c.trail = x.shape().element_count() / (c.lead * c.nk);
    c.out_extent = produce;
    std::vector<index_t> extents = x.shape().extents();
    extents[static_cast<std::size_t>(mode - 1)] = produce;
    c.out_shape = TensorShape(extents);
    return c;
}

}  // namespace

DenseTensor<double> ttm(const DenseTensor<double>& x, index_t mode,
                        const FactorMatrix<double>& a, bool transposed) {
    const ContractionDims c = prepare(x, mode, a.rows(), a.cols(), transposed);
    DenseTensor<double> y{c.out_shape};

    // For each (hi, out) slab, sweep the contraction index in increasing
    // order and scale contiguous lead-sized panels.
    for (index_t hi = 0; hi < c.trail; ++hi) {
        const index_t x_base = hi * c.lead * c.nk;
        const index_t y_base = hi * c.lead * c.out_extent;
        for (index_t out = 0; out < c.out_extent; ++out) {
            double* yp = &y[y_base + out * c.lead];
            for (index_t t = 0; t < c.nk; ++t) {
                const double w = transposed ? a.at(t, out) : a.at(out, t);
                const double* xp = &x[x_base + t * c.lead];
                for (index_t lo = 0; lo < c.lead; ++lo) yp[lo] += w * xp[lo];
            }
        }
    }
    return y;
}

DenseTensor<FxValue> ttm(const DenseTensor<FxValue>& x, index_t mode,
                         const FactorMatrix<FxValue>& a, bool transposed,
                         const FxProfile& profile, FxStats* stats,
                         std::optional<FxFormat> out_fmt) {
    const ContractionDims c = prepare(x, mode, a.rows(), a.cols(), transposed);
    const FxFormat acc_fmt = profile.product_fmt;
    const FxFormat y_fmt = out_fmt.value_or(profile.tensor_fmt);
    DenseTensor<FxValue> y{c.out_shape};

    for (index_t hi = 0; hi < c.trail; ++hi) {
        const index_t x_base = hi * c.lead * c.nk;
        const index_t y_base = hi * c.lead * c.out_extent;
        for (index_t out = 0; out < c.out_extent; ++out)
            for (index_t lo = 0; lo < c.lead; ++lo) {
                FxValue acc{0, acc_fmt};
                for (index_t t = 0; t < c.nk; ++t) {
                    const FxValue w = transposed ? a.at(t, out) : a.at(out, t);
                    const FxValue prod = fx_mul(x[x_base + t * c.lead + lo], w, acc_fmt,
                                                stats, FxStage::kTtmProduct);
                    acc = fx_add(acc, prod, acc_fmt, stats, FxStage::kTtmAccum);
                }
                y[y_base + out * c.lead + lo] =
                    requantize(acc, y_fmt, stats, FxStage::kTtmOutput);
            }
    }
    return y;
}

DenseTensor<FxValue> ttm_tiled(const DenseTensor<FxValue>& x, index_t mode,
                               const FactorMatrix<FxValue>& a, bool transposed,
                               const HwConfig& cfg, const FxProfile& profile, FxStats* stats,
                               std::optional<FxFormat> out_fmt) {
    cfg.validate();
    const ContractionDims c = prepare(x, mode, a.rows(), a.cols(), transposed);
    const FxFormat acc_fmt = profile.product_fmt;
    const FxFormat y_fmt = out_fmt.value_or(profile.tensor_fmt);
    DenseTensor<FxValue> y{c.out_shape};

    const auto factor = [&](index_t t, index_t out) -> FxValue {
        return transposed ? a.at(t, out) : a.at(out, t);
    };

    if (mode == 1) {
        // Mode-1 fibers are contiguous.  Lane l of the PE row sees elements
        // l, l+q, l+2q, ... and keeps a private running sum; the q lane
        // partials are then combined once per fiber by the in-place adder
        // tree.  r and m steer the walk only, they touch no reduction chain.
        const index_t q = cfg.q;
        std::vector<FxValue> lanes(static_cast<std::size_t>(q));
        for (index_t hi = 0; hi < c.trail; ++hi) {
            const index_t x_base = hi * c.nk;
            for (index_t out0 = 0; out0 < c.out_extent; out0 += cfg.r)
                for (index_t out = out0; out < std::min(out0 + cfg.r, c.out_extent); ++out) {
                    const index_t active = std::min(q, c.nk);
                    for (index_t l = 0; l < active; ++l) {
                        FxValue acc{0, acc_fmt};
                        for (index_t t = l; t < c.nk; t += q) {
                            const FxValue prod = fx_mul(x[x_base + t], factor(t, out),
                                                        acc_fmt, stats, FxStage::kTtmProduct);
                            acc = fx_add(acc, prod, acc_fmt, stats, FxStage::kTtmAccum);
                        }
                        lanes[static_cast<std::size_t>(l)] = acc;
                    }
                    const FxValue sum =
                        tree_reduce({lanes.data(), static_cast<std::size_t>(active)},
                                    acc_fmt, stats, FxStage::kTtmAccum);
                    y[hi * c.out_extent + out] =
                        requantize(sum, y_fmt, stats, FxStage::kTtmOutput);
                }
        }
        return y;
    }

    // Other modes: the folded leading block is walked q elements per cycle in
    // batches of m, and every output element accumulates sequentially in
    // increasing contraction-index order.
    const index_t m = cfg.batch_size();
    for (index_t hi = 0; hi < c.trail; ++hi) {
        const index_t x_base = hi * c.lead * c.nk;
        const index_t y_base = hi * c.lead * c.out_extent;
        for (index_t lo0 = 0; lo0 < c.lead; lo0 += m) {
            const index_t lo_end = std::min(lo0 + m, c.lead);
            for (index_t out0 = 0; out0 < c.out_extent; out0 += cfg.r)
                for (index_t out = out0; out < std::min(out0 + cfg.r, c.out_extent); ++out)
                    for (index_t lo = lo0; lo < lo_end; ++lo) {
                        FxValue acc{0, acc_fmt};
                        for (index_t t = 0; t < c.nk; ++t) {
                            const FxValue prod =
                                fx_mul(x[x_base + t * c.lead + lo], factor(t, out), acc_fmt,
                                       stats, FxStage::kTtmProduct);
                            acc = fx_add(acc, prod, acc_fmt, stats, FxStage::kTtmAccum);
                        }
                        y[y_base + out * c.lead + lo] =
                            requantize(acc, y_fmt, stats, FxStage::kTtmOutput);
                    }
        }
    }
    return y;
}

}  // namespace tuckersim
