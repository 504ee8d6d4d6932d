// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Per-iteration TTM schedule.
//
// Updating mode k needs B_k = X x_{j != k} A_j^T with the modes applied in
// decreasing order, j = d, ..., k+1, k-1, ..., 1.  Factors above k are not
// yet refreshed when mode k is processed (modes update in increasing k), so
// every chain's leading run [d, ..., k+1] is computed with the same factor
// values; chain 1 materializes those prefixes once and later chains reuse
// them.  Steps below k always use just-updated factors and are never shared.
// Per iteration the fresh step count is therefore
//
//     (d - 1) + sum_{k=2}^{d} (k - 1) = (d - 1)(1 + d/2).
//
// Slot ids name operands: slot 0 is the input tensor, slot d-j+1 holds the
// shared prefix X x A_d^T ... x A_j^T, and higher slots are chain-local.
// ---------------------------------------------------------------------------
struct TtmStep {
    index_t mode = 0;      // mode applied by this step
    int input_slot = 0;
    int output_slot = 0;
    bool fresh = true;     // false: read from the shared prefix cache
};

struct ChainPlan {
    index_t skip_mode = 0;
    bool warm_premultiply = false;  // extra multiply by the previous mode basis
    int result_slot = 0;
    std::vector<TtmStep> steps;     // decreasing mode order, skip_mode omitted

    [[nodiscard]] index_t fresh_steps() const {
        index_t n = 0;
        for (const auto& s : steps) n += s.fresh ? 1 : 0;
        return n;
    }
};

struct TtmPlan {
    index_t order = 0;
    bool warm = false;
    std::vector<ChainPlan> chains;  // index k-1 updates mode k
    int slot_count = 0;

    [[nodiscard]] index_t fresh_steps() const {
        index_t n = 0;
        for (const auto& c : chains) n += c.fresh_steps();
        return n;
    }
    [[nodiscard]] index_t warm_steps() const {
        index_t n = 0;
        for (const auto& c : chains) n += c.warm_premultiply ? 1 : 0;
        return n;
    }
};

/// Schedule for updating one mode.  Reuse annotations assume the canonical
/// k = 1..d sweep, under which mode k's leading d-k steps are already cached.
[[nodiscard]] ChainPlan plan_ttm_chain(index_t order, index_t skip_mode, bool warm_start);

/// Schedule for a whole iteration: all d chains with shared prefixes
/// materialized exactly once.
[[nodiscard]] TtmPlan plan_hooi_iteration(index_t order, bool warm_start);

}  // namespace tuckersim
