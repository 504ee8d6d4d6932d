// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// HwConfig: geometry and clock of the modeled accelerator.
//
//   q  PE columns; contiguous mode-1 elements consumed per cycle
//   r  PE rows; output columns produced per pass
//   p  SVD lanes; row elements processed per cycle in the sweep unit
//   q' read lanes of the permute unit   (0 selects q)
//   p' write lanes of the permute unit  (0 selects p)
//   m  batch size along the folded leading modes (0 selects q)
//
// permute_constant is the per-element constant of the permute stage cost.
// jacobi_sweeps_per_svd scales the SVD stage cost; warm-started runs use 1.
// include_preload adds the mode-1 factor preload term, which the cost model
// otherwise treats as hidden by pipelining.
// ---------------------------------------------------------------------------
struct HwConfig {
    index_t q = 16;
    index_t r = 16;
    index_t p = 64;
    index_t permute_read_lanes = 0;   // q'
    index_t permute_write_lanes = 0;  // p'
    index_t batch = 0;                // m
    double clock_hz = 185.0e6;
    index_t permute_constant = 5;
    index_t jacobi_sweeps_per_svd = 1;
    bool include_preload = false;

    [[nodiscard]] index_t qprime() const { return permute_read_lanes > 0 ? permute_read_lanes : q; }
    [[nodiscard]] index_t pprime() const { return permute_write_lanes > 0 ? permute_write_lanes : p; }
    [[nodiscard]] index_t batch_size() const { return batch > 0 ? batch : q; }

    void validate() const {
        if (q < 1 || r < 1 || p < 1)
            throw std::invalid_argument("HwConfig: q, r and p must be positive");
        if (permute_read_lanes < 0 || permute_write_lanes < 0 || batch < 0)
            throw std::invalid_argument("HwConfig: lane and batch overrides cannot be negative");
        if (clock_hz <= 0.0) throw std::invalid_argument("HwConfig: clock_hz must be positive");
        if (permute_constant < 1)
            throw std::invalid_argument("HwConfig: permute_constant must be positive");
        if (jacobi_sweeps_per_svd < 1)
            throw std::invalid_argument("HwConfig: jacobi_sweeps_per_svd must be positive");
    }
};

[[nodiscard]] inline index_t ceil_div(index_t a, index_t b) { return (a + b - 1) / b; }

}  // namespace tuckersim
