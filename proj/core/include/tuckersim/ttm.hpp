// SPDX-License-Identifier: MIT
#pragma once

#include <optional>

#include "tuckersim/fxp.hpp"
#include "tuckersim/hw_config.hpp"
#include "tuckersim/matrix.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Tensor-times-matrix along one mode, computed in place over the
// mode-1-major buffer.  No permutation or unfolding copy is made.
//
// With factor A of shape I_k x R_k:
//   transposed = true :  Y(..., r, ...) = sum_i X(..., i, ...) A(i, r)
//                        (contracts the mode against A's rows; the mode
//                        extent must equal I_k and becomes R_k)
//   transposed = false:  Y(..., i, ...) = sum_r X(..., r, ...) A(i, r)
//                        (contracts against A's columns; extent R_k -> I_k)
//
// Contraction accumulates in increasing contraction-index order.
// ---------------------------------------------------------------------------
[[nodiscard]] DenseTensor<double> ttm(const DenseTensor<double>& x, index_t mode,
                                      const FactorMatrix<double>& a, bool transposed);

/// Fixed-point reference variant: one multiply and one add per term, products
/// and accumulators in profile.product_fmt, output written in `out_fmt`
/// (profile.tensor_fmt when not given).  Same accumulation order as above.
[[nodiscard]] DenseTensor<FxValue> ttm(const DenseTensor<FxValue>& x, index_t mode,
                                       const FactorMatrix<FxValue>& a, bool transposed,
                                       const FxProfile& profile, FxStats* stats = nullptr,
                                       std::optional<FxFormat> out_fmt = std::nullopt);

// ---------------------------------------------------------------------------
// ttm_tiled: the hardware-scheduled fixed-point kernel.
//
// A q x r PE array reads q contiguous mode-1 elements per cycle and produces
// r output columns per pass; the folded leading modes are visited in batches
// of cfg.batch_size().  For mode 1 each of the q lanes accumulates its own
// partial over the fiber and the lane partials are combined with the in-place
// adder tree (tree_reduce); for any other mode each output element
// accumulates sequentially in increasing contraction-index order.  Output is
// bit-deterministic given (cfg, profile): the tile walk cannot change any
// per-element accumulation chain, only q's lane grouping for mode 1 does.
// ---------------------------------------------------------------------------
[[nodiscard]] DenseTensor<FxValue> ttm_tiled(const DenseTensor<FxValue>& x, index_t mode,
                                             const FactorMatrix<FxValue>& a, bool transposed,
                                             const HwConfig& cfg, const FxProfile& profile,
                                             FxStats* stats = nullptr,
                                             std::optional<FxFormat> out_fmt = std::nullopt);

}  // namespace tuckersim
