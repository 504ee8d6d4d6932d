// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tuckersim/fxp.hpp"
#include "tuckersim/matrix.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD over the ROWS of a working matrix B.
//
// Rotations J(i,j,theta) are applied from the left to both B and an
// accumulated orthogonal transform W, preserving W * B_original = B.  At
// convergence the rows of B are mutually orthogonal, so B = diag(sigma) * V^T
// and the rows of W are the left singular vectors (B_original = W^T B).
//
// Two execution paths share the algorithm: a double-precision path (libm
// trig) and a bit-deterministic fixed-point path (integer moments + CORDIC).
// ---------------------------------------------------------------------------

// ---------------------------------------------------------------------------
// Pair scheduling: tournament round-robin.  Index 0 stays put while the other
// indices rotate one position per round, giving n-1 rounds of n/2 disjoint
// pairs for even n (odd n sits one index out per round via a phantom slot).
// Every unordered pair appears exactly once per sweep, and pairs within a
// round touch disjoint rows.
// ---------------------------------------------------------------------------
using PairRound = std::vector<std::pair<index_t, index_t>>;

/// Rounds of disjoint 0-based row pairs covering all C(n,2) pairs once.
/// Throws std::invalid_argument when n < 2.
[[nodiscard]] std::vector<PairRound> round_robin_schedule(index_t n);

// ---------------------------------------------------------------------------
// Real path
// ---------------------------------------------------------------------------
struct RotationParams {
    double alpha = 0.0;  // |b_i|^2
    double beta = 0.0;   // |b_j|^2
    double gamma = 0.0;  // <b_i, b_j>
    double theta = 0.0;  // rotation angle, radians, in [-pi/4, pi/4]
    double c = 1.0;      // cos(theta)
    double s = 0.0;      // sin(theta)
};

/// Moments and the orthogonalizing angle for one row pair:
/// theta = atan2(2*gamma, beta - alpha) / 2, folded into [-pi/4, pi/4] by
/// adding or subtracting pi/2 (the quadrant fold keeps the rotation valid
/// because tan(2*theta) is pi/2-periodic in theta).  gamma == 0 gives
/// theta == 0.
[[nodiscard]] RotationParams rotation_params(std::span<const double> bi,
                                             std::span<const double> bj);

/// Replace rows i,j of both B and W by the simultaneous plane rotation
///   b_i' = c*b_i - s*b_j,   b_j' = s*b_i + c*b_j
/// evaluated on the pre-update rows (both new rows read both old rows).
void apply_rotation(Matrix<double>& b, Matrix<double>& w, index_t i, index_t j,
                    double c, double s);

/// max over pairs of |<b_i,b_j>| / sqrt(|b_i|^2 |b_j|^2); zero rows
/// contribute 0.  The convergence measure for the sweep loop.
[[nodiscard]] double off_measure(const Matrix<double>& b);

struct JacobiOptions {
    int max_sweeps = 30;  // 1 for warm starts
    double tol = 1e-10;   // sweep stops when every pair ratio is <= tol
};

struct JacobiResult {
    Matrix<double> b;      // rotated matrix (rows orthogonal at convergence)
    Matrix<double> w;      // accumulated transform; w * input = b
    int sweeps = 0;        // full sweeps executed
    double off = 0.0;      // max pair ratio seen during the last sweep
    bool converged = false;
};

/// Run full round-robin sweeps until a sweep finds every pair ratio within
/// tol (no rotation applied) or max_sweeps is reached.  w0 must be orthogonal
/// with the same row count as b0; pass the previous basis together with the
/// pre-multiplied matrix b0 = w0 * B to warm-start.  A matrix with fewer than
/// two rows is already converged.  Throws std::invalid_argument on shape
/// mismatch or max_sweeps < 1.
[[nodiscard]] JacobiResult jacobi_sweeps(Matrix<double> b0, Matrix<double> w0,
                                         const JacobiOptions& opt = {});

/// Cold start: w0 = identity.
[[nodiscard]] JacobiResult jacobi_sweeps(Matrix<double> b0, const JacobiOptions& opt = {});

/// Row indices sorted by descending Euclidean row norm, ties broken by the
/// lower index first.
[[nodiscard]] std::vector<index_t> row_order_by_norm(const Matrix<double>& b);

/// The dominant r left singular vectors as a factor matrix: rows of b_final
/// are ranked by norm, and the corresponding rows of w become the columns of
/// the result (I_k x r), flagged orthonormal.  Throws when r is out of range.
[[nodiscard]] FactorMatrix<double> leading_factors(const Matrix<double>& w,
                                                   const Matrix<double>& b_final, index_t r);

/// The top-r rows of b_final in the same ranking (r x cols).  When b_final
/// came from the last mode of a decomposition sweep these rows are the
/// unfolded core.
[[nodiscard]] Matrix<double> leading_rows(const Matrix<double>& b_final, index_t r);

// ---------------------------------------------------------------------------
// Fixed-point path
// ---------------------------------------------------------------------------

/// A matrix of raw fixed-point words sharing one format plus a power-of-two
/// block exponent: value(i,j) = m.at(i,j) * 2^(scale_log2 - fmt.frac_bits).
/// The block exponent lets matrix memory hold data whose magnitude exceeds
/// the format range; rotations are invariant to it.
struct FxMatrix {
    Matrix<std::int64_t> m;
    FxFormat fmt{27, 24};
    int scale_log2 = 0;

    [[nodiscard]] double value_at(index_t i, index_t j) const;
};

/// Load an unfolded fixed-point tensor into matrix memory.  The block
/// exponent is chosen so the largest stored magnitude lands in (0.25, 0.5]
/// (zero input keeps exponent 0): loads can never saturate and keep roughly
/// two magnitude bits of headroom for rotations, which never grow a row pair
/// by more than sqrt(2).  Elements are rounded to nearest-even; stats are
/// recorded under the format-conversion stage.
[[nodiscard]] FxMatrix fx_load_matrix(const UnfoldedMatrix<FxValue>& u, FxFormat matrix_fmt,
                                      FxStats* stats = nullptr);

/// Identity transform at the given format (scale 0).
[[nodiscard]] FxMatrix fx_identity(index_t n, FxFormat matrix_fmt);

struct FxRotationParams {
    FxValue alpha{};  // scalar-format moments of the PRE-SCALED pair:
    FxValue beta{};   // both rows are scaled by 2^pair_scale_log2 before the
    FxValue gamma{};  // moments are formed, so each moment carries a factor
                      // 2^(2*pair_scale_log2); the angle is unaffected.
    int pair_scale_log2 = 0;
    FxValue theta{};  // angle format, in [-pi/4, pi/4]
    FxValue c{};      // cos(theta), angle format
    FxValue s{};      // sin(theta), angle format
    bool rotate = false;  // false when the integer convergence test passed
};

/// Fixed-point moments and CORDIC angle for rows i,j of b.
///
/// Each squared term is an exact 53-bit integer product; a shared per-pair
/// power-of-two pre-scale (chosen so the pair's largest magnitude lands in
/// (0.25, 0.5], clamped to [-8, 11]) is folded into the rounding shift so the
/// accumulated moments use the top of the scalar range without overflow.
/// Convergence is decided purely in integers:
///   gamma_raw^2 <= (alpha_raw * beta_raw) >> (2*tol_bits)
/// which is exactly |gamma| / sqrt(alpha*beta) <= 2^-tol_bits and is
/// invariant under the pre-scale.  When the test passes, rotate is false and
/// no angle is computed.
[[nodiscard]] FxRotationParams fx_rotation_params(const FxMatrix& b, index_t i, index_t j,
                                                  const FxProfile& profile, int tol_bits,
                                                  FxStats* stats = nullptr);

/// Simultaneous pre-update plane rotation of rows i,j of both b and w.
/// Products are exact; each new element is rounded once to the matrix format.
void fx_apply_rotation(FxMatrix& b, FxMatrix& w, index_t i, index_t j, FxValue c, FxValue s,
                       FxStats* stats = nullptr);

struct FxJacobiOptions {
    int max_sweeps = 30;  // 1 for warm starts
    int tol_bits = 0;     // 0 -> profile.matrix_fmt.frac_bits - 4
    FxProfile profile{};
};

struct FxJacobiResult {
    FxMatrix b;
    FxMatrix w;
    int sweeps = 0;
    bool converged = false;  // a full sweep applied no rotation
};

/// Fixed-point sweep loop; same contract as the real overload with the
/// integer convergence test deciding per-pair skips.  Bit-deterministic for a
/// given profile.
[[nodiscard]] FxJacobiResult jacobi_sweeps(FxMatrix b0, FxMatrix w0, const FxJacobiOptions& opt,
                                           FxStats* stats = nullptr);

/// Cold start: w0 = identity at b0's format.
[[nodiscard]] FxJacobiResult jacobi_sweeps(FxMatrix b0, const FxJacobiOptions& opt,
                                           FxStats* stats = nullptr);

/// Exact-integer analogue of row_order_by_norm (sums of squared raw words).
[[nodiscard]] std::vector<index_t> row_order_by_norm(const FxMatrix& b);

/// Fixed-point analogue of leading_factors; the result carries w's format
/// (w has block exponent 0 by construction).
[[nodiscard]] FactorMatrix<FxValue> fx_leading_factors(const FxMatrix& w,
                                                       const FxMatrix& b_final, index_t r);

/// Fixed-point analogue of leading_rows; keeps b_final's format and block
/// exponent.
[[nodiscard]] FxMatrix fx_leading_rows(const FxMatrix& b_final, index_t r);

}  // namespace tuckersim
