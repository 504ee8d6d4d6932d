// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>

#include "tuckersim/hooi.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Synthetic test tensors: X = G x_1 A_1 ... x_d A_d + E, where the core G and
// the (non-orthogonalized) factors A_k have i.i.d. standard-normal entries
// and E is white Gaussian noise with variance = noise_ratio times the
// empirical variance of the signal entries.  Sampling order is fixed (core,
// then factors in mode order filled column-major, then noise flat), so a
// seed fully determines the tensor.
// ---------------------------------------------------------------------------
struct SynthSpec {
    std::vector<index_t> dims;
    std::vector<index_t> rank;
    double noise_ratio = 0.0;
    std::uint64_t seed = 1;
};

/// Throws std::invalid_argument on bad dims/rank or negative noise_ratio.
[[nodiscard]] DenseTensor<double> synth_tensor(const SynthSpec& spec);

}  // namespace tuckersim
