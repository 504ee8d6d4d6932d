// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

#include "tuckersim/hw_config.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Analytic cycle-count and DSP-resource model of the accelerator.  Pure
// integer arithmetic with ceiling semantics; nothing here executes the
// numeric kernels.  Cycle counts grow multiplicatively with tensor order, so
// all entry points throw std::overflow_error if a count would leave int64.
// ---------------------------------------------------------------------------

struct DspEstimate {
    std::int64_t ttm_dsp = 0;  // one DSP per PE multiplier: q * r
    std::int64_t svd_dsp = 0;  // four wide multipliers per lane, two DSP each: 8 * p
    [[nodiscard]] std::int64_t total() const { return ttm_dsp + svd_dsp; }
};

struct PermuteCycles {
    std::int64_t in = 0;   // unfolding the chain result into matrix memory
    std::int64_t out = 0;  // writing the updated basis back
};

/// Cycles for the chain step applying mode j while updating mode k (j != k).
/// Piecewise in the relative position of j and k:
///   j > k:      I_j * prod_{j'>j} R_j' * ceil(prod_{j'<j} I_j' / q) * ceil(R_j / r)
///   1 < j < k:  I_j * I_k * prod_{j'>j, j'!=k} R_j' * ceil(prod_{j'<j} I_j' / q) * ceil(R_j / r)
///   j = 1:      I_k * prod_{j'>=2, j'!=k} R_j' * ceil(I_1 / q) * ceil(R_1 / r)
/// (Modes below j still have full extent I, modes above are already reduced
/// to R except mode k, which is never contracted in its own chain.)
[[nodiscard]] std::int64_t cycles_ttm(const std::vector<index_t>& dims,
                                      const std::vector<index_t>& ranks, index_t k, index_t j,
                                      const HwConfig& cfg);

/// Cycles for the warm-start basis pre-multiply of mode k (an extra TTM over
/// the finished chain result, whose mode-k extent is still I_k):
///   k != 1:  I_k * prod_{j'>k} R_j' * ceil(prod_{j'<k} R_j' / q) * ceil(I_k / r)
///   k = 1:   prod_{j'>=2} R_j' * ceil(I_1 / q) * ceil(I_1 / r)
[[nodiscard]] std::int64_t cycles_ttm_warm(const std::vector<index_t>& dims,
                                           const std::vector<index_t>& ranks, index_t k,
                                           const HwConfig& cfg);

/// Sweep-unit cycles for the mode-k orthogonalization:
///   I_k * (I_k - 1) * ceil((I_k + R_/k) / p)   per sweep,
/// times cfg.jacobi_sweeps_per_svd, with R_/k = prod_{i != k} R_i.
[[nodiscard]] std::int64_t cycles_svd(const std::vector<index_t>& dims,
                                      const std::vector<index_t>& ranks, index_t k,
                                      const HwConfig& cfg);

/// Data-movement cycles around the mode-k orthogonalization, with
/// c = cfg.permute_constant, q' and p' the permute lane counts:
///   in  = c * (I_k * ceil(R_/k / q') + R_/k * ceil(I_k / p'))
///   out = c * I_k * (ceil(I_k / q') + ceil(I_k / p'))
[[nodiscard]] PermuteCycles cycles_permute(const std::vector<index_t>& dims,
                                           const std::vector<index_t>& ranks, index_t k,
                                           const HwConfig& cfg);

[[nodiscard]] DspEstimate estimate_dsp(const HwConfig& cfg);

/// Storage compression: prod(I) / (prod(R) + sum_k I_k * R_k).
[[nodiscard]] double compression_ratio(const std::vector<index_t>& dims,
                                       const std::vector<index_t>& ranks);

struct ModeCycles {
    index_t mode = 0;
    std::vector<std::int64_t> ttm;  // fresh chain steps executed for this mode's update
    std::int64_t ttm_warm = 0;      // basis pre-multiply; 0 when cold
    std::int64_t svd = 0;
    std::int64_t permute_in = 0;
    std::int64_t permute_out = 0;
    [[nodiscard]] std::int64_t ttm_total() const;
    [[nodiscard]] std::int64_t total() const;
};

struct IterationCycles {
    std::vector<ModeCycles> modes;
    [[nodiscard]] std::int64_t total() const;
};

struct CycleReport {
    std::vector<IterationCycles> iterations;
    std::int64_t ttm_cycles = 0;      // fresh chain steps, all iterations
    std::int64_t warm_cycles = 0;     // basis pre-multiplies
    std::int64_t svd_cycles = 0;
    std::int64_t permute_cycles = 0;  // both directions
    std::int64_t total = 0;           // sum of the four groups
    double wall_time_seconds = 0.0;   // total / cfg.clock_hz
    double clock_hz = 0.0;
    DspEstimate dsp;
};

/// Full decomposition estimate for `iters` iterations.  Chains share leading
/// steps exactly as the execution schedule does, so each iteration counts
/// (d-1)(1+d/2) fresh TTM steps; warm-start adds one pre-multiply TTM per
/// mode per iteration.  `overhead_cycles` is an optional additive constant
/// for pipeline effects the model otherwise ignores.
[[nodiscard]] CycleReport total_cycles(const std::vector<index_t>& dims,
                                       const std::vector<index_t>& ranks, const HwConfig& cfg,
                                       int iters, bool warm_start,
                                       std::int64_t overhead_cycles = 0);

}  // namespace tuckersim
