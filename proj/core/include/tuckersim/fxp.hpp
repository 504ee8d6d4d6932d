// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tuckersim {

// ---------------------------------------------------------------------------
// FxFormat: signed two's-complement fixed point with `total_bits` total and
// `frac_bits` fractional bits.  A raw integer r represents the value
// r * 2^-frac_bits.  total_bits in [2, 64], frac_bits in [0, total_bits - 1].
// ---------------------------------------------------------------------------
struct FxFormat {
    std::uint8_t total_bits = 16;
    std::uint8_t frac_bits = 12;

    [[nodiscard]] static FxFormat of(int total, int frac) {
        if (total < 2 || total > 64)
            throw std::invalid_argument("FxFormat: total_bits " + std::to_string(total) +
                                        " outside [2, 64]");
        if (frac < 0 || frac > total - 1)
            throw std::invalid_argument("FxFormat: frac_bits " + std::to_string(frac) +
                                        " outside [0, total_bits - 1]");
        return FxFormat{static_cast<std::uint8_t>(total), static_cast<std::uint8_t>(frac)};
    }

    [[nodiscard]] std::int64_t max_raw() const {
        return total_bits == 64 ? std::numeric_limits<std::int64_t>::max()
                                : (std::int64_t{1} << (total_bits - 1)) - 1;
    }
    [[nodiscard]] std::int64_t min_raw() const {
        return total_bits == 64 ? std::numeric_limits<std::int64_t>::min()
                                : -(std::int64_t{1} << (total_bits - 1));
    }
    /// Smallest representable step, 2^-frac_bits.
    [[nodiscard]] double resolution() const { return std::ldexp(1.0, -frac_bits); }

    bool operator==(const FxFormat& o) const {
        return total_bits == o.total_bits && frac_bits == o.frac_bits;
    }
    bool operator!=(const FxFormat& o) const { return !(*this == o); }

    [[nodiscard]] std::string to_string() const {
        return "(" + std::to_string(total_bits) + "," + std::to_string(frac_bits) + ")";
    }
};

/// One fixed-point number: raw two's-complement integer plus its format.
struct FxValue {
    std::int64_t raw = 0;
    FxFormat fmt{};
};

// ---------------------------------------------------------------------------
// Quantization statistics.  One accumulator per emulation session; sessions
// are independent and never shared across threads.  Saturation is silent at
// the arithmetic level but every event is counted here, and the largest
// pre-saturation magnitude seen at each pipeline stage is recorded.
// ---------------------------------------------------------------------------
enum class FxStage : int {
    kQuantize = 0,   // double -> fixed input quantization
    kConvert,        // format conversions and block loads
    kTtmProduct,     // PE multiply
    kTtmAccum,       // PE accumulate / adder tree
    kTtmOutput,      // write back of a TTM element
    kSvdMoment,      // alpha/beta/gamma accumulation
    kSvdRotation,    // row rotation multiply-add
    kCordic,         // angle pipeline
    kOther,
    kCount
};

[[nodiscard]] const char* fx_stage_name(FxStage s);

struct FxStats {
    struct Stage {
        std::uint64_t saturations = 0;
        std::uint64_t operations = 0;
        double max_abs = 0.0;  // largest ideal magnitude observed, pre-saturation
    };
    std::array<Stage, static_cast<std::size_t>(FxStage::kCount)> stages{};

    [[nodiscard]] std::uint64_t total_saturations() const {
        std::uint64_t n = 0;
        for (const auto& s : stages) n += s.saturations;
        return n;
    }
    void merge(const FxStats& other) {
        for (std::size_t i = 0; i < stages.size(); ++i) {
            stages[i].saturations += other.stages[i].saturations;
            stages[i].operations += other.stages[i].operations;
            if (other.stages[i].max_abs > stages[i].max_abs)
                stages[i].max_abs = other.stages[i].max_abs;
        }
    }
    void reset() { stages.fill(Stage{}); }
};

// ---------------------------------------------------------------------------
// Core arithmetic.  All rounding is round-to-nearest-even, all overflow
// saturates to the format limits, and everything is pure integer math so the
// results are bit-identical across platforms.
// ---------------------------------------------------------------------------
namespace detail {

/// Arithmetic shift right by `s` bits with round-to-nearest-even. s >= 0.
[[nodiscard]] inline __int128 rne_shift_right(__int128 v, int s) {
    if (s <= 0) return v << (-s);
    if (s > 126) return 0;
    const __int128 one = 1;
    const __int128 q = v >> s;                 // floor division
    const __int128 rem = v - (q << s);         // in [0, 2^s)
    const __int128 half = one << (s - 1);
    if (rem > half) return q + 1;
    if (rem < half) return q;
    return q + (q & 1);                        // tie: round to even
}

/// Clamp a wide value to the format range, recording the event.
[[nodiscard]] inline std::int64_t saturate(__int128 v, FxFormat fmt, FxStats* stats,
                                           FxStage stage) {
    const std::int64_t lo = fmt.min_raw();
    const std::int64_t hi = fmt.max_raw();
    std::int64_t out;
    bool clipped = false;
    if (v > hi) {
        out = hi;
        clipped = true;
    } else if (v < lo) {
        out = lo;
        clipped = true;
    } else {
        out = static_cast<std::int64_t>(v);
    }
    if (stats != nullptr) {
        auto& st = stats->stages[static_cast<std::size_t>(stage)];
        st.operations += 1;
        if (clipped) st.saturations += 1;
        const double mag =
            std::fabs(static_cast<double>(v)) * std::ldexp(1.0, -fmt.frac_bits);
        if (mag > st.max_abs) st.max_abs = mag;
    }
    return out;
}

}  // namespace detail

/// Nearest representable value (round-to-nearest-even, saturating).
/// Non-finite input saturates (NaN clamps to zero) and is counted.
[[nodiscard]] inline FxValue quantize(double x, FxFormat fmt, FxStats* stats = nullptr,
                                      FxStage stage = FxStage::kQuantize) {
    FxValue v{0, fmt};
    if (std::isnan(x)) {
        if (stats != nullptr) {
            auto& st = stats->stages[static_cast<std::size_t>(stage)];
            st.operations += 1;
            st.saturations += 1;
        }
        return v;
    }
    const double scaled = std::ldexp(x, fmt.frac_bits);
    __int128 raw;
    if (scaled >= 0x1.0p+100) {
        raw = __int128{1} << 101;
    } else if (scaled <= -0x1.0p+100) {
        raw = -(__int128{1} << 101);
    } else {
        raw = static_cast<__int128>(static_cast<long double>(std::nearbyint(scaled)));
    }
    v.raw = detail::saturate(raw, fmt, stats, stage);
    return v;
}

/// Exact value of a fixed-point number as a double.
[[nodiscard]] inline double value_of(FxValue v) {
    return std::ldexp(static_cast<double>(v.raw), -v.fmt.frac_bits);
}

/// Rebins `v` into `out` after an optional exact power-of-two scaling by
/// 2^scale_log2.  Integer-only: shifts, round-to-nearest-even, saturation.
[[nodiscard]] inline FxValue requantize(FxValue v, FxFormat out, FxStats* stats = nullptr,
                                        FxStage stage = FxStage::kConvert,
                                        int scale_log2 = 0) {
    const int shift = v.fmt.frac_bits - scale_log2 - out.frac_bits;
    __int128 raw = v.raw;
    raw = shift >= 0 ? detail::rne_shift_right(raw, shift) : raw << (-shift);
    return FxValue{detail::saturate(raw, out, stats, stage), out};
}

/// Exact sum after binary-point alignment, then rounded into `out`.
[[nodiscard]] inline FxValue fx_add(FxValue a, FxValue b, FxFormat out,
                                    FxStats* stats = nullptr,
                                    FxStage stage = FxStage::kTtmAccum) {
    const int frac = std::max(a.fmt.frac_bits, b.fmt.frac_bits);
    const __int128 wa = static_cast<__int128>(a.raw) << (frac - a.fmt.frac_bits);
    const __int128 wb = static_cast<__int128>(b.raw) << (frac - b.fmt.frac_bits);
    __int128 sum = wa + wb;
    const int shift = frac - out.frac_bits;
    sum = shift >= 0 ? detail::rne_shift_right(sum, shift) : sum << (-shift);
    return FxValue{detail::saturate(sum, out, stats, stage), out};
}

/// Exact integer product realigned to `out`, then rounded and saturated.
[[nodiscard]] inline FxValue fx_mul(FxValue a, FxValue b, FxFormat out,
                                    FxStats* stats = nullptr,
                                    FxStage stage = FxStage::kTtmProduct) {
    const __int128 prod = static_cast<__int128>(a.raw) * static_cast<__int128>(b.raw);
    const int shift = a.fmt.frac_bits + b.fmt.frac_bits - out.frac_bits;
    const __int128 aligned =
        shift >= 0 ? detail::rne_shift_right(prod, shift) : prod << (-shift);
    return FxValue{detail::saturate(aligned, out, stats, stage), out};
}

/// In-place adder tree: pads with zeros to the next power of two, then runs
/// log2(n) stages of adjacent pairwise adds, every stage in `out`.  The
/// result is bit-identical to that exact order.
[[nodiscard]] FxValue tree_reduce(std::span<const FxValue> values, FxFormat out,
                                  FxStats* stats = nullptr,
                                  FxStage stage = FxStage::kTtmAccum);

// ---------------------------------------------------------------------------
// FxProfile: the bit-width plan for one emulated datapath.
//   tensor:  tensor elements in DRAM            default (16,12)
//   matrix:  on-chip matrix data (B, W, factors) default (27,24)
//   product: multiplier outputs and accumulators default (48,24)
//   scalar:  row moments alpha/beta/gamma        default (32,20)
//   angle:   theta and sin/cos                   default (32,29)
// ---------------------------------------------------------------------------
struct FxProfile {
    FxFormat tensor_fmt{16, 12};
    FxFormat matrix_fmt{27, 24};
    FxFormat product_fmt{48, 24};
    FxFormat scalar_fmt{32, 20};
    FxFormat angle_fmt{32, 29};
    int cordic_iterations = 24;

    /// Compact text form, e.g. "t16.12,m27.24,p48.24,s32.20,a32.29,c24".
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] static FxProfile parse(const std::string& text);

    bool operator==(const FxProfile& o) const {
        return tensor_fmt == o.tensor_fmt && matrix_fmt == o.matrix_fmt &&
               product_fmt == o.product_fmt && scalar_fmt == o.scalar_fmt &&
               angle_fmt == o.angle_fmt && cordic_iterations == o.cordic_iterations;
    }
};

}  // namespace tuckersim
