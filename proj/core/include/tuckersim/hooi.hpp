// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <vector>

#include "tuckersim/fxp.hpp"
#include "tuckersim/hw_config.hpp"
#include "tuckersim/jacobi_svd.hpp"
#include "tuckersim/matrix.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Tucker decomposition drivers.
//
// hooi() alternates over modes: for mode k it contracts the input with every
// other factor (one chain of tensor-times-matrix steps, shared-prefix
// schedule from ttm_plan), orthogonalizes the rows of the unfolded result
// with one-sided Jacobi, and keeps the dominant rank-R_k basis.  The
// warm-start variant seeds each Jacobi run with the previous iteration's
// basis (pre-multiplying the unfolded matrix by it) and then needs only one
// sweep per mode.  A bit-deterministic fixed-point path mirrors the real path
// using the tiled kernels and CORDIC rotations.
// ---------------------------------------------------------------------------

struct TuckerRank {
    std::vector<index_t> r;

    [[nodiscard]] index_t order() const { return static_cast<index_t>(r.size()); }
    [[nodiscard]] index_t at(index_t mode) const;  // 1-based, checked
    [[nodiscard]] index_t elements() const;        // product of all ranks
    /// Throws std::invalid_argument unless 1 <= R_k <= I_k for every mode.
    void validate(const TensorShape& shape) const;
    [[nodiscard]] std::string to_string() const;
};

struct TuckerModel {
    std::vector<FactorMatrix<double>> factors;  // A_k: I_k x R_k, orthonormal
    DenseTensor<double> core;                   // shape = rank, input units
    // Fixed-point runs divide the input by `scale` before quantizing so the
    // largest magnitude fills the tensor format; the reported core has the
    // scale multiplied back in, so reconstruction never needs it.  1.0 for
    // real runs.
    double scale = 1.0;
};

enum class HooiInit { kRandomOrthonormal, kHosvd };
enum class NumericPath { kReal, kFixed };

struct HooiOptions {
    HooiInit init = HooiInit::kRandomOrthonormal;
    std::uint64_t seed = 1;
    int max_iters = 8;
    double tol = 1e-4;  // stop when |err_t - err_{t-1}| / max(err_{t-1}, 1e-12) < tol
    // When false, always run max_iters iterations (error-curve comparisons
    // need equal-length curves); `converged` still reports the tol test.
    bool stop_on_convergence = true;
    bool warm_start = true;
    NumericPath path = NumericPath::kReal;
    FxProfile profile{};  // fixed path formats
    HwConfig hw{};        // fixed path kernel geometry
    int max_sweeps_cold = 30;
    double svd_tol = 1e-10;  // real-path pair ratio tolerance
    int svd_tol_bits = 0;    // fixed-path tolerance exponent; 0 -> format default
};

struct HooiStats {
    std::vector<double> rel_error;          // percent, one entry per iteration
    std::vector<std::vector<int>> sweeps;   // [iteration][mode] Jacobi sweeps used
    index_t ttm_steps = 0;                  // fresh chain steps executed
    index_t warm_premultiplies = 0;         // basis pre-multiplications executed
    int iterations = 0;
    bool converged = false;
    FxStats fx;  // populated by the fixed path

    [[nodiscard]] long total_sweeps() const;
    [[nodiscard]] double final_error() const;  // percent; NaN before any iteration
};

struct HooiResult {
    TuckerModel model;
    HooiStats stats;
};

/// Seeded Gaussian matrices orthonormalized column-by-column (two passes of
/// modified Gram-Schmidt).  Deterministic: one generator seeded with `seed`
/// fills factor 1 first, each factor column-major.
[[nodiscard]] std::vector<FactorMatrix<double>> random_orthonormal_init(const TensorShape& shape,
                                                                        const TuckerRank& rank,
                                                                        std::uint64_t seed);

/// Truncated leading left singular basis of each mode unfolding, from
/// cold-started Jacobi run to full convergence.  Costly on large tensors.
[[nodiscard]] std::vector<FactorMatrix<double>> hosvd_init(const DenseTensor<double>& x,
                                                           const TuckerRank& rank);

/// G = X x_1 A_1^T x_2 A_2^T ... x_d A_d^T.
[[nodiscard]] DenseTensor<double> core_tensor(const DenseTensor<double>& x,
                                              const std::vector<FactorMatrix<double>>& factors);

/// Relative reconstruction error in PERCENT via the orthonormal-projection
/// identity |X - Xhat|^2 = |X|^2 - |G|^2: returns
/// sqrt(max(0, x_norm_sq - |G|^2)) / sqrt(x_norm_sq) * 100.
/// Valid only when G was produced by orthonormal factors.  Throws on
/// x_norm_sq <= 0.
[[nodiscard]] double fit_error_fast(double x_norm_sq, const DenseTensor<double>& g);

/// Full reconstruction G x_1 A_1 ... x_d A_d (times model.scale = 1 path
/// convention: the core already carries the scale).
[[nodiscard]] DenseTensor<double> reconstruct(const TuckerModel& model);

/// |X - reconstruct(model)|_F / |X|_F in PERCENT.
[[nodiscard]] double relative_error(const DenseTensor<double>& x, const TuckerModel& model);

/// Run HOOI.  Throws std::invalid_argument on rank violations, non-finite
/// input, or an all-zero input tensor.
[[nodiscard]] HooiResult hooi(const DenseTensor<double>& x, const TuckerRank& rank,
                              const HooiOptions& opt = {});

}  // namespace tuckersim
