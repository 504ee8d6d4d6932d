// SPDX-License-Identifier: MIT
#pragma once

#include "tuckersim/fxp.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// CORDIC angle pipeline.
//
// Pure shift-and-add integer arithmetic over hardcoded constant tables, so
// results are bit-identical across platforms.  Internal precision is 56
// fractional bits; outputs are quantized to `angle_fmt`.
//
// With n iterations the angle error is bounded by atan(2^-(n-1)) plus the
// output quantization step; sin/cos carry the same bound and satisfy
// sin^2 + cos^2 = 1 within 2^-(n-2).
// ---------------------------------------------------------------------------

struct FxSinCos {
    FxValue sin;
    FxValue cos;
};

/// Four-quadrant arctangent of y/x in vectoring mode.  Inputs may use any
/// formats; the pair is pre-scaled by a common power of two, which leaves
/// the angle unchanged.  The zero vector yields angle 0, matching atan2.
[[nodiscard]] FxValue cordic_arctan(FxValue y, FxValue x, int iterations,
                                    FxFormat angle_fmt = FxFormat{32, 29},
                                    FxStats* stats = nullptr);

/// Sine and cosine in rotation mode with gain compensation folded into the
/// start vector.  theta is reduced internally to [-pi, pi).
[[nodiscard]] FxSinCos cordic_sincos(FxValue theta, int iterations,
                                     FxFormat angle_fmt = FxFormat{32, 29},
                                     FxStats* stats = nullptr);

}  // namespace tuckersim
