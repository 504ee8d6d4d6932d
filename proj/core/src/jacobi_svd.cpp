#include "tuckersim/jacobi_svd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tuckersim/cordic.hpp"

namespace tuckersim {

namespace {

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

// Tournament seating: slot 0 is pinned; the tail rotates left one step per
// round.  The initial arrangement [1, 3, 5, ..., 6, 4, 2] (1-based) makes the
// first round pair consecutive indices: (1,2), (3,4), (5,6), ...
std::vector<index_t> initial_circle(index_t m) {
    std::vector<index_t> arr;
    arr.reserve(static_cast<std::size_t>(m));
    arr.push_back(1);
    for (index_t v = 3; v <= m; v += 2) arr.push_back(v);
    for (index_t v = m - (m % 2 == 0 ? 0 : 1); v >= 2; v -= 2) arr.push_back(v);
    return arr;
}

double pair_ratio(double alpha, double beta, double gamma) {
    const double denom = std::sqrt(alpha) * std::sqrt(beta);
    if (denom <= 0.0) return 0.0;
    return std::fabs(gamma) / denom;
}

RotationParams params_from_moments(double alpha, double beta, double gamma) {
    RotationParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    constexpr double kQuarterPi = std::numbers::pi / 4.0;
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    double theta = 0.5 * std::atan2(2.0 * gamma, beta - alpha);
    if (theta > kQuarterPi) {
        theta -= kHalfPi;
    } else if (theta < -kQuarterPi) {
        theta += kHalfPi;
    }
    p.theta = theta;
    p.c = std::cos(theta);
    p.s = std::sin(theta);
    return p;
}

void moments(std::span<const double> bi, std::span<const double> bj, double& alpha, double& beta,
             double& gamma) {
    double a = 0.0, b = 0.0, g = 0.0;
    for (std::size_t l = 0; l < bi.size(); ++l) {
        a += bi[l] * bi[l];
        b += bj[l] * bj[l];
        g += bi[l] * bj[l];
    }
    alpha = a;
    beta = b;
    gamma = g;
}

void check_sweep_args(index_t b_rows, index_t w_rows, index_t w_cols, int max_sweeps) {
    if (max_sweeps < 1) {
        throw std::invalid_argument("jacobi_sweeps: max_sweeps must be >= 1, got " +
                                    std::to_string(max_sweeps));
    }
    if (w_rows != b_rows || w_cols != b_rows) {
        throw std::invalid_argument("jacobi_sweeps: transform must be " + std::to_string(b_rows) +
                                    "x" + std::to_string(b_rows) + ", got " +
                                    std::to_string(w_rows) + "x" + std::to_string(w_cols));
    }
}

}  // namespace

std::vector<PairRound> round_robin_schedule(index_t n) {
    if (n < 2) {
        throw std::invalid_argument("round_robin_schedule: need at least 2 indices, got " +
                                    std::to_string(n));
    }
    const index_t m = (n % 2 == 0) ? n : n + 1;  // phantom index m sits out when n is odd
    std::vector<index_t> arr = initial_circle(m);
    std::vector<PairRound> rounds;
    rounds.reserve(static_cast<std::size_t>(m - 1));
    for (index_t round = 0; round < m - 1; ++round) {
        PairRound pairs;
        pairs.reserve(static_cast<std::size_t>(m / 2));
        for (index_t i = 0; i < m / 2; ++i) {
            index_t a = arr[static_cast<std::size_t>(i)];
            index_t b = arr[static_cast<std::size_t>(m - 1 - i)];
            if (a > n || b > n) continue;  // phantom
            if (a > b) std::swap(a, b);
            pairs.emplace_back(a - 1, b - 1);  // emit 0-based
        }
        rounds.push_back(std::move(pairs));
        std::rotate(arr.begin() + 1, arr.begin() + 2, arr.end());
    }
    return rounds;
}

// ---------------------------------------------------------------------------
// Real path
// ---------------------------------------------------------------------------

RotationParams rotation_params(std::span<const double> bi, std::span<const double> bj) {
    if (bi.size() != bj.size()) {
        throw std::invalid_argument("rotation_params: rows differ in length");
    }
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    moments(bi, bj, alpha, beta, gamma);
    return params_from_moments(alpha, beta, gamma);
}

void apply_rotation(Matrix<double>& b, Matrix<double>& w, index_t i, index_t j, double c,
                    double s) {
    auto rotate_rows = [c, s](std::span<double> ri, std::span<double> rj) {
        for (std::size_t l = 0; l < ri.size(); ++l) {
            const double vi = ri[l];
            const double vj = rj[l];
            ri[l] = c * vi - s * vj;
            rj[l] = s * vi + c * vj;
        }
    };
    rotate_rows(b.row(i), b.row(j));
    rotate_rows(w.row(i), w.row(j));
}

double off_measure(const Matrix<double>& b) {
    double worst = 0.0;
    for (index_t i = 0; i + 1 < b.rows(); ++i) {
        for (index_t j = i + 1; j < b.rows(); ++j) {
            double alpha = 0.0, beta = 0.0, gamma = 0.0;
            moments(b.row(i), b.row(j), alpha, beta, gamma);
            worst = std::max(worst, pair_ratio(alpha, beta, gamma));
        }
    }
    return worst;
}

JacobiResult jacobi_sweeps(Matrix<double> b0, Matrix<double> w0, const JacobiOptions& opt) {
    check_sweep_args(b0.rows(), w0.rows(), w0.cols(), opt.max_sweeps);
    JacobiResult res;
    res.b = std::move(b0);
    res.w = std::move(w0);
    if (res.b.rows() < 2) {
        res.converged = true;
        return res;
    }
    const auto schedule = round_robin_schedule(res.b.rows());
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        double sweep_off = 0.0;
        long rotations = 0;
        for (const auto& round : schedule) {
            for (const auto& [i, j] : round) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                moments(res.b.row(i), res.b.row(j), alpha, beta, gamma);
                const double ratio = pair_ratio(alpha, beta, gamma);
                sweep_off = std::max(sweep_off, ratio);
                if (ratio <= opt.tol) continue;
                const RotationParams p = params_from_moments(alpha, beta, gamma);
                apply_rotation(res.b, res.w, i, j, p.c, p.s);
                ++rotations;
            }
        }
        res.sweeps = sweep;
        res.off = sweep_off;
        if (rotations == 0) {
            res.converged = true;
            break;
        }
    }
    return res;
}

JacobiResult jacobi_sweeps(Matrix<double> b0, const JacobiOptions& opt) {
    const index_t n = b0.rows();
    return jacobi_sweeps(std::move(b0), Matrix<double>::identity(n, 1.0), opt);
}

std::vector<index_t> row_order_by_norm(const Matrix<double>& b) {
    std::vector<double> norms(static_cast<std::size_t>(b.rows()), 0.0);
    for (index_t r = 0; r < b.rows(); ++r) {
        norms[static_cast<std::size_t>(r)] = frobenius_norm_sq(b.row(r));
    }
    std::vector<index_t> order(static_cast<std::size_t>(b.rows()));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(), [&](index_t a, index_t c) {
        const double na = norms[static_cast<std::size_t>(a)];
        const double nc = norms[static_cast<std::size_t>(c)];
        if (na != nc) return na > nc;
        return a < c;
    });
    return order;
}

FactorMatrix<double> leading_factors(const Matrix<double>& w, const Matrix<double>& b_final,
                                     index_t r) {
    if (r < 1 || r > b_final.rows()) {
        throw std::invalid_argument("leading_factors: rank " + std::to_string(r) +
                                    " out of range [1, " + std::to_string(b_final.rows()) + "]");
    }
    if (w.rows() != b_final.rows() || w.cols() != w.rows()) {
        throw std::invalid_argument("leading_factors: transform shape mismatch");
    }
    const auto order = row_order_by_norm(b_final);
    FactorMatrix<double> a(w.cols(), r, /*orthonormal=*/true);
    for (index_t c = 0; c < r; ++c) {
        const index_t src = order[static_cast<std::size_t>(c)];
        for (index_t i = 0; i < w.cols(); ++i) a.at(i, c) = w.at(src, i);
    }
    return a;
}

Matrix<double> leading_rows(const Matrix<double>& b_final, index_t r) {
    if (r < 1 || r > b_final.rows()) {
        throw std::invalid_argument("leading_rows: rank " + std::to_string(r) +
                                    " out of range [1, " + std::to_string(b_final.rows()) + "]");
    }
    const auto order = row_order_by_norm(b_final);
    Matrix<double> out(r, b_final.cols());
    for (index_t c = 0; c < r; ++c) {
        const auto src = b_final.row(order[static_cast<std::size_t>(c)]);
        std::copy(src.begin(), src.end(), out.row(c).begin());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-point path
// ---------------------------------------------------------------------------

double FxMatrix::value_at(index_t i, index_t j) const {
    return std::ldexp(static_cast<double>(m.at(i, j)), scale_log2 - fmt.frac_bits);
}

namespace {

// Power-of-two exponent placing a maximum raw magnitude `m` (interpreted at
// `frac_in` fraction bits) into (0.25, 0.5] after dividing by 2^e.
int block_exponent(std::int64_t m, int frac_in) {
    if (m <= 0) return 0;
    const int bw = std::bit_width(static_cast<std::uint64_t>(m));
    const bool pow2 = (m & (m - 1)) == 0;
    return bw + 1 - frac_in - (pow2 ? 1 : 0);
}

std::int64_t max_abs_raw(std::span<const std::int64_t> vals) {
    std::int64_t m = 0;
    for (std::int64_t v : vals) {
        const std::int64_t a = v < 0 ? -v : v;  // min int64 never occurs in our formats
        m = std::max(m, a);
    }
    return m;
}

}  // namespace

FxMatrix fx_load_matrix(const UnfoldedMatrix<FxValue>& u, FxFormat matrix_fmt, FxStats* stats) {
    FxMatrix out;
    out.fmt = matrix_fmt;
    out.m = Matrix<std::int64_t>(u.rows, u.cols);
    if (u.data.empty()) return out;

    const FxFormat in_fmt = u.data.front().fmt;
    std::int64_t max_raw = 0;
    for (const FxValue& v : u.data) {
        if (!(v.fmt == in_fmt)) {
            throw std::invalid_argument("fx_load_matrix: mixed element formats");
        }
        max_raw = std::max(max_raw, v.raw < 0 ? -v.raw : v.raw);
    }
    const int e = block_exponent(max_raw, in_fmt.frac_bits);
    out.scale_log2 = e;
    // stored = value / 2^e, i.e. raw_in * 2^(frac_out - frac_in - e)
    const int shift = in_fmt.frac_bits - matrix_fmt.frac_bits + e;
    auto& dst = out.m.storage();
    for (std::size_t idx = 0; idx < u.data.size(); ++idx) {
        const __int128 stored = detail::rne_shift_right(u.data[idx].raw, shift);
        dst[idx] = detail::saturate(stored, matrix_fmt, stats, FxStage::kConvert);
    }
    return out;
}

FxMatrix fx_identity(index_t n, FxFormat matrix_fmt) {
    if (matrix_fmt.frac_bits > matrix_fmt.total_bits - 2) {
        throw std::invalid_argument("fx_identity: format cannot represent 1.0: " +
                                    matrix_fmt.to_string());
    }
    FxMatrix w;
    w.fmt = matrix_fmt;
    w.m = Matrix<std::int64_t>::identity(n, std::int64_t{1} << matrix_fmt.frac_bits);
    return w;
}

FxRotationParams fx_rotation_params(const FxMatrix& b, index_t i, index_t j,
                                    const FxProfile& profile, int tol_bits, FxStats* stats) {
    const FxFormat scalar = profile.scalar_fmt;
    const FxFormat angle = profile.angle_fmt;
    FxRotationParams out;
    out.alpha = FxValue{0, scalar};
    out.beta = FxValue{0, scalar};
    out.gamma = FxValue{0, scalar};
    out.theta = FxValue{0, angle};
    out.c = quantize(1.0, angle);  // saturates if the format cannot hold 1.0
    out.s = FxValue{0, angle};

    const auto ri = b.m.row(i);
    const auto rj = b.m.row(j);
    const std::int64_t max_raw = std::max(max_abs_raw(ri), max_abs_raw(rj));
    if (max_raw == 0) return out;  // two zero rows: nothing to rotate

    // Shared pre-scale: rows are conceptually multiplied by 2^s so the pair's
    // largest magnitude lands in (0.25, 0.5]; the factor is folded into the
    // product shift (each squared term carries 2^(2s)).
    const int f = b.fmt.frac_bits;
    const int s_scale = std::clamp(-block_exponent(max_raw, f), -8, 11);
    out.pair_scale_log2 = s_scale;
    const int shift = f - 2 * s_scale;

    const FxFormat term_fmt = FxFormat::of(48, static_cast<int>(f));
    FxValue acc_a{0, profile.product_fmt};
    FxValue acc_b{0, profile.product_fmt};
    FxValue acc_g{0, profile.product_fmt};
    for (std::size_t l = 0; l < ri.size(); ++l) {
        const __int128 pa = static_cast<__int128>(ri[l]) * ri[l];
        const __int128 pb = static_cast<__int128>(rj[l]) * rj[l];
        const __int128 pg = static_cast<__int128>(ri[l]) * rj[l];
        const FxValue ta{static_cast<std::int64_t>(detail::rne_shift_right(pa, shift)), term_fmt};
        const FxValue tb{static_cast<std::int64_t>(detail::rne_shift_right(pb, shift)), term_fmt};
        const FxValue tg{static_cast<std::int64_t>(detail::rne_shift_right(pg, shift)), term_fmt};
        acc_a = fx_add(acc_a, ta, profile.product_fmt, stats, FxStage::kSvdMoment);
        acc_b = fx_add(acc_b, tb, profile.product_fmt, stats, FxStage::kSvdMoment);
        acc_g = fx_add(acc_g, tg, profile.product_fmt, stats, FxStage::kSvdMoment);
    }
    out.alpha = requantize(acc_a, scalar, stats, FxStage::kSvdMoment);
    out.beta = requantize(acc_b, scalar, stats, FxStage::kSvdMoment);
    out.gamma = requantize(acc_g, scalar, stats, FxStage::kSvdMoment);

    // Integer convergence test: gamma^2 <= alpha*beta / 2^(2*tol_bits), i.e.
    // |gamma|/sqrt(alpha*beta) <= 2^-tol_bits.  Invariant under the pre-scale.
    // The moments are only known to one LSB of the scalar format, so the
    // threshold is floored at one LSB^2: a measured |gamma| of one LSB is
    // indistinguishable from orthogonal, and rotating on it would chase
    // quantization noise with perpetual +/-1-LSB corrections.
    const __int128 lhs = static_cast<__int128>(out.gamma.raw) * out.gamma.raw;
    const __int128 rhs = std::max<__int128>(
        (static_cast<__int128>(out.alpha.raw) * out.beta.raw) >> (2 * tol_bits), 1);
    if (lhs <= rhs) return out;  // converged pair; rotate stays false

    // theta = atan2(2*gamma, beta - alpha) / 2, folded into [-pi/4, pi/4].
    FxValue y{0, scalar};
    y.raw = detail::saturate(static_cast<__int128>(out.gamma.raw) * 2, scalar, stats,
                             FxStage::kSvdMoment);
    const FxValue x{out.beta.raw - out.alpha.raw, scalar};
    const FxValue full = cordic_arctan(y, x, profile.cordic_iterations, angle, stats);
    std::int64_t theta_raw =
        static_cast<std::int64_t>(detail::rne_shift_right(full.raw, 1));
    const std::int64_t quarter_pi =
        std::llround(std::ldexp(std::numbers::pi / 4.0, angle.frac_bits));
    const std::int64_t half_pi =
        std::llround(std::ldexp(std::numbers::pi / 2.0, angle.frac_bits));
    if (theta_raw > quarter_pi) {
        theta_raw -= half_pi;
    } else if (theta_raw < -quarter_pi) {
        theta_raw += half_pi;
    }
    out.theta = FxValue{theta_raw, angle};
    const FxSinCos sc = cordic_sincos(out.theta, profile.cordic_iterations, angle, stats);
    out.s = sc.sin;
    out.c = sc.cos;
    out.rotate = true;
    return out;
}

void fx_apply_rotation(FxMatrix& b, FxMatrix& w, index_t i, index_t j, FxValue c, FxValue s,
                       FxStats* stats) {
    if (!(c.fmt == s.fmt)) {
        throw std::invalid_argument("fx_apply_rotation: sin/cos formats differ");
    }
    const int angle_frac = c.fmt.frac_bits;
    auto rotate_rows = [&](Matrix<std::int64_t>& mat, index_t ri, index_t rj, FxFormat fmt) {
        auto rowi = mat.row(ri);
        auto rowj = mat.row(rj);
        for (std::size_t l = 0; l < rowi.size(); ++l) {
            const std::int64_t vi = rowi[l];
            const std::int64_t vj = rowj[l];
            const __int128 ni =
                static_cast<__int128>(c.raw) * vi - static_cast<__int128>(s.raw) * vj;
            const __int128 nj =
                static_cast<__int128>(s.raw) * vi + static_cast<__int128>(c.raw) * vj;
            rowi[l] = detail::saturate(detail::rne_shift_right(ni, angle_frac), fmt, stats,
                                       FxStage::kSvdRotation);
            rowj[l] = detail::saturate(detail::rne_shift_right(nj, angle_frac), fmt, stats,
                                       FxStage::kSvdRotation);
        }
    };
    rotate_rows(b.m, i, j, b.fmt);
    rotate_rows(w.m, i, j, w.fmt);
}

FxJacobiResult jacobi_sweeps(FxMatrix b0, FxMatrix w0, const FxJacobiOptions& opt,
                             FxStats* stats) {
    check_sweep_args(b0.m.rows(), w0.m.rows(), w0.m.cols(), opt.max_sweeps);
    const int tol_bits =
        opt.tol_bits > 0 ? opt.tol_bits : std::max(1, opt.profile.matrix_fmt.frac_bits - 4);
    FxJacobiResult res;
    res.b = std::move(b0);
    res.w = std::move(w0);
    if (res.b.m.rows() < 2) {
        res.converged = true;
        return res;
    }
    const auto schedule = round_robin_schedule(res.b.m.rows());
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        long rotations = 0;
        for (const auto& round : schedule) {
            for (const auto& [i, j] : round) {
                const FxRotationParams p =
                    fx_rotation_params(res.b, i, j, opt.profile, tol_bits, stats);
                if (!p.rotate) continue;
                fx_apply_rotation(res.b, res.w, i, j, p.c, p.s, stats);
                ++rotations;
            }
        }
        res.sweeps = sweep;
        if (rotations == 0) {
            res.converged = true;
            break;
        }
    }
    return res;
}

FxJacobiResult jacobi_sweeps(FxMatrix b0, const FxJacobiOptions& opt, FxStats* stats) {
    FxMatrix w0 = fx_identity(b0.m.rows(), b0.fmt);
    return jacobi_sweeps(std::move(b0), std::move(w0), opt, stats);
}

std::vector<index_t> row_order_by_norm(const FxMatrix& b) {
    const index_t n = b.m.rows();
    std::vector<unsigned __int128> norms(static_cast<std::size_t>(n), 0);
    for (index_t r = 0; r < n; ++r) {
        unsigned __int128 acc = 0;
        for (std::int64_t v : b.m.row(r)) {
            acc += static_cast<unsigned __int128>(static_cast<__int128>(v) * v);
        }
        norms[static_cast<std::size_t>(r)] = acc;
    }
    std::vector<index_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(), [&](index_t a, index_t c) {
        const auto na = norms[static_cast<std::size_t>(a)];
        const auto nc = norms[static_cast<std::size_t>(c)];
        if (na != nc) return na > nc;
        return a < c;
    });
    return order;
}

FactorMatrix<FxValue> fx_leading_factors(const FxMatrix& w, const FxMatrix& b_final, index_t r) {
    if (r < 1 || r > b_final.m.rows()) {
        throw std::invalid_argument("fx_leading_factors: rank " + std::to_string(r) +
                                    " out of range [1, " + std::to_string(b_final.m.rows()) + "]");
    }
    if (w.m.rows() != b_final.m.rows() || w.m.cols() != w.m.rows()) {
        throw std::invalid_argument("fx_leading_factors: transform shape mismatch");
    }
    if (w.scale_log2 != 0) {
        throw std::invalid_argument("fx_leading_factors: transform must have block exponent 0");
    }
    const auto order = row_order_by_norm(b_final);
    FactorMatrix<FxValue> a(w.m.cols(), r, /*orthonormal=*/true);
    for (index_t c = 0; c < r; ++c) {
        const index_t src = order[static_cast<std::size_t>(c)];
        for (index_t i = 0; i < w.m.cols(); ++i) a.at(i, c) = FxValue{w.m.at(src, i), w.fmt};
    }
    return a;
}

FxMatrix fx_leading_rows(const FxMatrix& b_final, index_t r) {
    if (r < 1 || r > b_final.m.rows()) {
        throw std::invalid_argument("fx_leading_rows: rank " + std::to_string(r) +
                                    " out of range [1, " + std::to_string(b_final.m.rows()) + "]");
    }
    const auto order = row_order_by_norm(b_final);
    FxMatrix out;
    out.fmt = b_final.fmt;
    out.scale_log2 = b_final.scale_log2;
    out.m = Matrix<std::int64_t>(r, b_final.m.cols());
    for (index_t c = 0; c < r; ++c) {
        const auto src = b_final.m.row(order[static_cast<std::size_t>(c)]);
        std::copy(src.begin(), src.end(), out.m.row(c).begin());
    }
    return out;
}

}  // namespace tuckersim
