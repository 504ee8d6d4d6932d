#include "tuckersim/ttm_plan.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tuckersim {

namespace {

void check_order(index_t order) {
    if (order < 1) {
        throw std::invalid_argument("ttm_plan: tensor order must be >= 1, got " +
                                    std::to_string(order));
    }
}

}  // namespace

ChainPlan plan_ttm_chain(index_t order, index_t skip_mode, bool warm_start) {
    check_order(order);
    if (skip_mode < 1 || skip_mode > order) {
        throw std::invalid_argument("ttm_plan: skip_mode " + std::to_string(skip_mode) +
                                    " out of range [1, " + std::to_string(order) + "]");
    }
    const index_t d = order;
    const index_t k = skip_mode;

    ChainPlan chain;
    chain.skip_mode = k;
    chain.warm_premultiply = warm_start;

    // Leading run j = d, ..., k+1: shared across chains, materialized by the
    // chain that updates mode 1.  Prefix through mode j lives in slot d-j+1.
    for (index_t j = d; j >= k + 1; --j) {
        TtmStep s;
        s.mode = j;
        s.input_slot = static_cast<int>(d - j);
        s.output_slot = static_cast<int>(d - j + 1);
        s.fresh = (k == 1);
        chain.steps.push_back(s);
    }

    // Trailing run j = k-1, ..., 1: always fresh (these factors were updated
    // earlier in the same iteration).  Ping-pong between two scratch slots.
    const int scratch_a = static_cast<int>(d);
    const int scratch_b = static_cast<int>(d) + 1;
    int input = static_cast<int>(d - k);  // slot of prefix [d..k+1]; 0 when k == d
    int output = scratch_a;
    for (index_t j = k - 1; j >= 1; --j) {
        TtmStep s;
        s.mode = j;
        s.input_slot = input;
        s.output_slot = output;
        s.fresh = true;
        chain.steps.push_back(s);
        input = output;
        output = (output == scratch_a) ? scratch_b : scratch_a;
    }

    chain.result_slot = chain.steps.empty() ? 0 : chain.steps.back().output_slot;
    return chain;
}

TtmPlan plan_hooi_iteration(index_t order, bool warm_start) {
    check_order(order);
    TtmPlan plan;
    plan.order = order;
    plan.warm = warm_start;
    plan.chains.reserve(static_cast<std::size_t>(order));
    int max_slot = 0;
    for (index_t k = 1; k <= order; ++k) {
        ChainPlan chain = plan_ttm_chain(order, k, warm_start);
        for (const auto& s : chain.steps) {
            max_slot = std::max(max_slot, std::max(s.input_slot, s.output_slot));
        }
        plan.chains.push_back(std::move(chain));
    }
    plan.slot_count = max_slot + 1;
    return plan;
}

}  // namespace tuckersim
