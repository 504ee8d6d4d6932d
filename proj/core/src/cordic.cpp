// SPDX-License-Identifier: MIT
#include "tuckersim/cordic.hpp"

#include <cstdint>
#include <stdexcept>

namespace tuckersim {
namespace {

// Working precision: 56 fractional bits.  All constants below were computed
// with 60-digit decimal arithmetic and rounded once to this grid.
constexpr int kFrac = 56;
constexpr int kMaxIterations = 60;

// atan(2^-i) * 2^56, i = 0..59.
constexpr std::int64_t kAtanTable[kMaxIterations] = {
    INT64_C(56593902016227522), INT64_C(33409331186036030), INT64_C(17652573055549883), INT64_C(8960721713639278),
    INT64_C(4497749271019253), INT64_C(2251067235130761), INT64_C(1125808294293075), INT64_C(562938500594601),
    INT64_C(281473545067998), INT64_C(140737309398767), INT64_C(70368721808055), INT64_C(35184369292630),
    INT64_C(17592185694891), INT64_C(8796092978517), INT64_C(4398046505643), INT64_C(2199023254869),
    INT64_C(1099511627691), INT64_C(549755813877), INT64_C(274877906943), INT64_C(137438953472),
    INT64_C(68719476736), INT64_C(34359738368), INT64_C(17179869184), INT64_C(8589934592),
    INT64_C(4294967296), INT64_C(2147483648), INT64_C(1073741824), INT64_C(536870912),
    INT64_C(268435456), INT64_C(134217728), INT64_C(67108864), INT64_C(33554432),
    INT64_C(16777216), INT64_C(8388608), INT64_C(4194304), INT64_C(2097152),
    INT64_C(1048576), INT64_C(524288), INT64_C(262144), INT64_C(131072),
    INT64_C(65536), INT64_C(32768), INT64_C(16384), INT64_C(8192),
    INT64_C(4096), INT64_C(2048), INT64_C(1024), INT64_C(512),
    INT64_C(256), INT64_C(128), INT64_C(64), INT64_C(32),
    INT64_C(16), INT64_C(8), INT64_C(4), INT64_C(2),
    INT64_C(1), INT64_C(0), INT64_C(0), INT64_C(0),
};

// K(n) * 2^56 with K(n) = prod_{i=0}^{n-1} 1/sqrt(1 + 2^-2i), n = 1..60.
// Rotation mode starts at (K(n), 0) so no post-scaling is needed.
constexpr std::int64_t kGainTable[kMaxIterations] = {
    INT64_C(50952413380206181), INT64_C(45573223974324343), INT64_C(44212521446134197), INT64_C(43871106904727535),
    INT64_C(43785671367161772), INT64_C(43764307291058426), INT64_C(43758965946400582), INT64_C(43757630589866104),
    INT64_C(43757296749459076), INT64_C(43757213289277727), INT64_C(43757192424227415), INT64_C(43757187207964526),
    INT64_C(43757185903898785), INT64_C(43757185577882348), INT64_C(43757185496378239), INT64_C(43757185476002212),
    INT64_C(43757185470908205), INT64_C(43757185469634703), INT64_C(43757185469316328), INT64_C(43757185469236734),
    INT64_C(43757185469216835), INT64_C(43757185469211861), INT64_C(43757185469210617), INT64_C(43757185469210306),
    INT64_C(43757185469210228), INT64_C(43757185469210209), INT64_C(43757185469210204), INT64_C(43757185469210203),
    INT64_C(43757185469210203), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
    INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202), INT64_C(43757185469210202),
};

constexpr std::int64_t kPi = INT64_C(226375608064910089);     // pi * 2^56
constexpr std::int64_t kPiHalf = INT64_C(113187804032455044); // pi/2 * 2^56
constexpr std::int64_t kTwoPi = INT64_C(452751216129820178);  // 2pi * 2^56

int clamp_iterations(int iterations) {
    if (iterations < 1 || iterations > kMaxIterations)
        throw std::invalid_argument("cordic: iterations must be in [1, 60]");
    return iterations;
}

// Output conversion: internal (frac 56) angle or coordinate to angle_fmt.
FxValue emit(std::int64_t raw56, FxFormat angle_fmt, FxStats* stats) {
    return requantize(FxValue{raw56, FxFormat{64, kFrac}}, angle_fmt, stats,
                      FxStage::kCordic);
}

__int128 floor_div(__int128 a, __int128 b) {
    __int128 q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return q;
}

}  // namespace

FxValue cordic_arctan(FxValue y, FxValue x, int iterations, FxFormat angle_fmt,
                      FxStats* stats) {
    const int n = clamp_iterations(iterations);
    // atan2(0, 0) == 0 by libm convention; the zero vector needs no rotation.
    if (x.raw == 0 && y.raw == 0) return FxValue{0, angle_fmt};

    // Bring both inputs to a shared binary point, then apply a common
    // power-of-two scale so the larger magnitude lands in [2^54, 2^55).
    // atan2 is invariant under positive common scaling.
    const int frac = std::max(x.fmt.frac_bits, y.fmt.frac_bits);
    __int128 wx = static_cast<__int128>(x.raw) << (frac - x.fmt.frac_bits);
    __int128 wy = static_cast<__int128>(y.raw) << (frac - y.fmt.frac_bits);
    __int128 mag = wx < 0 ? -wx : wx;
    const __int128 may = wy < 0 ? -wy : wy;
    if (may > mag) mag = may;
    const __int128 lo = __int128{1} << 54;
    while (mag < lo) {
        mag <<= 1;
        wx <<= 1;
        wy <<= 1;
    }
    while (mag >= (lo << 1)) {
        mag >>= 1;
        wx >>= 1;
        wy >>= 1;
    }

    std::int64_t xw = static_cast<std::int64_t>(wx);
    std::int64_t yw = static_cast<std::int64_t>(wy);
    std::int64_t z = 0;

    // Pre-rotation by +-pi/2 moves the vector into the right half plane,
    // inside the CORDIC convergence range (about 1.743 rad).
    if (xw < 0) {
        if (yw >= 0) {
            const std::int64_t t = xw;
            xw = yw;
            yw = -t;
            z = kPiHalf;
        } else {
            const std::int64_t t = xw;
            xw = -yw;
            yw = t;
            z = -kPiHalf;
        }
    }

    for (int i = 0; i < n; ++i) {
        const std::int64_t xs = xw >> i;
        const std::int64_t ys = yw >> i;
        if (yw >= 0) {
            xw += ys;
            yw -= xs;
            z += kAtanTable[i];
        } else {
            xw -= ys;
            yw += xs;
            z -= kAtanTable[i];
        }
    }
    return emit(z, angle_fmt, stats);
}

FxSinCos cordic_sincos(FxValue theta, int iterations, FxFormat angle_fmt, FxStats* stats) {
    const int n = clamp_iterations(iterations);

    // Angle to the internal grid, then range-reduce to [-pi, pi).
    const int shift = kFrac - theta.fmt.frac_bits;
    __int128 wz = static_cast<__int128>(theta.raw);
    wz = shift >= 0 ? wz << shift : detail::rne_shift_right(wz, -shift);
    wz -= floor_div(wz + kPi, kTwoPi) * kTwoPi;

    // Fold into [-pi/2, pi/2]; a pi offset flips both outputs.
    bool negate = false;
    if (wz > kPiHalf) {
        wz -= kPi;
        negate = true;
    } else if (wz < -kPiHalf) {
        wz += kPi;
        negate = true;
    }

    std::int64_t xw = kGainTable[n - 1];
    std::int64_t yw = 0;
    std::int64_t z = static_cast<std::int64_t>(wz);

    for (int i = 0; i < n; ++i) {
        const std::int64_t xs = xw >> i;
        const std::int64_t ys = yw >> i;
        if (z >= 0) {
            xw -= ys;
            yw += xs;
            z -= kAtanTable[i];
        } else {
            xw += ys;
            yw -= xs;
            z += kAtanTable[i];
        }
    }
    if (negate) {
        xw = -xw;
        yw = -yw;
    }
    return FxSinCos{emit(yw, angle_fmt, stats), emit(xw, angle_fmt, stats)};
}

}  // namespace tuckersim
