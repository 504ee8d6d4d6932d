#include "tuckersim/hooi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "tuckersim/rng.hpp"
#include "tuckersim/ttm.hpp"
#include "tuckersim/ttm_plan.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// TuckerRank
// ---------------------------------------------------------------------------

index_t TuckerRank::at(index_t mode) const {
    if (mode < 1 || mode > order()) {
        throw std::out_of_range("TuckerRank: mode " + std::to_string(mode) + " out of range [1, " +
                                std::to_string(order()) + "]");
    }
    return r[static_cast<std::size_t>(mode - 1)];
}

index_t TuckerRank::elements() const {
    index_t n = 1;
    for (index_t v : r) n *= v;
    return n;
}

void TuckerRank::validate(const TensorShape& shape) const {
    if (order() != shape.order()) {
        throw std::invalid_argument("TuckerRank: rank has " + std::to_string(order()) +
                                    " entries but the tensor has order " +
                                    std::to_string(shape.order()));
    }
    for (index_t k = 1; k <= order(); ++k) {
        const index_t rk = r[static_cast<std::size_t>(k - 1)];
        if (rk < 1 || rk > shape.extent(k)) {
            throw std::invalid_argument("TuckerRank: R_" + std::to_string(k) + " = " +
                                        std::to_string(rk) + " violates 1 <= R <= " +
                                        std::to_string(shape.extent(k)));
        }
    }
}

std::string TuckerRank::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(r[i]);
    }
    return s + "]";
}

long HooiStats::total_sweeps() const {
    long n = 0;
    for (const auto& per_mode : sweeps) {
        for (int s : per_mode) n += s;
    }
    return n;
}

double HooiStats::final_error() const {
    if (rel_error.empty()) return std::numeric_limits<double>::quiet_NaN();
    return rel_error.back();
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

namespace {

// Two passes of modified Gram-Schmidt against the already-accepted columns.
// Returns false if the candidate column is (numerically) in their span.
bool orthonormalize_column(FactorMatrix<double>& a, index_t c) {
    const index_t n = a.rows();
    auto col = a.col(c);
    for (int pass = 0; pass < 2; ++pass) {
        for (index_t p = 0; p < c; ++p) {
            const auto prev = a.col(p);
            double dot = 0.0;
            for (index_t i = 0; i < n; ++i) dot += prev[static_cast<std::size_t>(i)] *
                                                   col[static_cast<std::size_t>(i)];
            for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] -=
                dot * prev[static_cast<std::size_t>(i)];
        }
    }
    const double norm = std::sqrt(frobenius_norm_sq(col));
    if (norm < 1e-12) return false;
    for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] /= norm;
    return true;
}

}  // namespace

std::vector<FactorMatrix<double>> random_orthonormal_init(const TensorShape& shape,
                                                          const TuckerRank& rank,
                                                          std::uint64_t seed) {
    rank.validate(shape);
    GaussianSampler rng(seed);
    std::vector<FactorMatrix<double>> factors;
    factors.reserve(static_cast<std::size_t>(shape.order()));
    for (index_t k = 1; k <= shape.order(); ++k) {
        FactorMatrix<double> a(shape.extent(k), rank.at(k), /*orthonormal=*/true);
        for (index_t c = 0; c < a.cols(); ++c) {
            do {
                auto col = a.col(c);
                for (auto& v : col) v = rng.normal();
            } while (!orthonormalize_column(a, c));  // re-draw degenerate columns
        }
        factors.push_back(std::move(a));
    }
    return factors;
}

std::vector<FactorMatrix<double>> hosvd_init(const DenseTensor<double>& x,
                                             const TuckerRank& rank) {
    rank.validate(x.shape());
    std::vector<FactorMatrix<double>> factors;
    factors.reserve(static_cast<std::size_t>(x.order()));
    for (index_t k = 1; k <= x.order(); ++k) {
        auto u = unfold(x, k);
        Matrix<double> b(u.rows, u.cols, std::move(u.data));
        const JacobiResult jr = jacobi_sweeps(std::move(b));
        factors.push_back(leading_factors(jr.w, jr.b, rank.at(k)));
    }
    return factors;
}

// ---------------------------------------------------------------------------
// Model evaluation
// ---------------------------------------------------------------------------

DenseTensor<double> core_tensor(const DenseTensor<double>& x,
                                const std::vector<FactorMatrix<double>>& factors) {
    if (static_cast<index_t>(factors.size()) != x.order()) {
        throw std::invalid_argument("core_tensor: " + std::to_string(factors.size()) +
                                    " factors for an order-" + std::to_string(x.order()) +
                                    " tensor");
    }
    DenseTensor<double> g = ttm(x, 1, factors[0], /*transposed=*/true);
    for (index_t k = 2; k <= x.order(); ++k) {
        g = ttm(g, k, factors[static_cast<std::size_t>(k - 1)], /*transposed=*/true);
    }
    return g;
}

double fit_error_fast(double x_norm_sq, const DenseTensor<double>& g) {
    if (!(x_norm_sq > 0.0)) {
        throw std::invalid_argument("fit_error_fast: |X|^2 must be positive");
    }
    const double gns =
        frobenius_norm_sq({g.data(), static_cast<std::size_t>(g.size())});
    return 100.0 * std::sqrt(std::max(0.0, x_norm_sq - gns) / x_norm_sq);
}

DenseTensor<double> reconstruct(const TuckerModel& model) {
    DenseTensor<double> xhat = model.core;
    for (index_t k = 1; k <= xhat.order(); ++k) {
        xhat = ttm(xhat, k, model.factors[static_cast<std::size_t>(k - 1)],
                   /*transposed=*/false);
    }
    return xhat;
}

double relative_error(const DenseTensor<double>& x, const TuckerModel& model) {
    const DenseTensor<double> xhat = reconstruct(model);
    if (xhat.size() != x.size()) {
        throw std::invalid_argument("relative_error: model reconstructs " +
                                    xhat.shape().to_string() + ", input is " +
                                    x.shape().to_string());
    }
    double diff = 0.0;
    double comp = 0.0;
    for (index_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - xhat[i];
        const double term = d * d;
        const double t = diff + term;
        if (std::fabs(diff) >= std::fabs(term)) {
            comp += (diff - t) + term;
        } else {
            comp += (term - t) + diff;
        }
        diff = t;
    }
    const double xns = frobenius_norm_sq({x.data(), static_cast<std::size_t>(x.size())});
    if (!(xns > 0.0)) throw std::invalid_argument("relative_error: zero input tensor");
    return 100.0 * std::sqrt((diff + comp) / xns);
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

namespace {

void check_input(const DenseTensor<double>& x) {
    for (index_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw std::invalid_argument("hooi: input tensor has a non-finite element at flat index " +
                                        std::to_string(i));
        }
    }
}

bool error_converged(const std::vector<double>& errs, double tol) {
    const std::size_t n = errs.size();
    if (n < 2) return false;
    const double prev = errs[n - 2];
    return std::fabs(errs[n - 1] - prev) / std::max(prev, 1e-12) < tol;
}

/// Slot storage for one iteration's chain intermediates; slot 0 aliases the
/// immutable input tensor.
template <typename T>
class SlotStore {
public:
    SlotStore(const DenseTensor<T>* x, int slot_count) : x_(x) {
        slots_.resize(static_cast<std::size_t>(std::max(slot_count, 1)));
    }
    [[nodiscard]] const DenseTensor<T>& get(int s) const {
        return s == 0 ? *x_ : slots_[static_cast<std::size_t>(s)];
    }
    void put(int s, DenseTensor<T>&& t) { slots_[static_cast<std::size_t>(s)] = std::move(t); }

private:
    const DenseTensor<T>* x_;
    std::vector<DenseTensor<T>> slots_;
};

/// Transposed copy of an orthogonal row basis, laid out as a factor whose
/// column c is row c of w: contracting a tensor mode with it (transposed
/// form) applies w to that mode's fibers.
FactorMatrix<double> basis_as_factor(const Matrix<double>& w) {
    FactorMatrix<double> f(w.cols(), w.rows(), /*orthonormal=*/true);
    for (index_t c = 0; c < f.cols(); ++c) {
        for (index_t i = 0; i < f.rows(); ++i) f.at(i, c) = w.at(c, i);
    }
    return f;
}

FactorMatrix<FxValue> basis_as_factor(const FxMatrix& w) {
    FactorMatrix<FxValue> f(w.m.cols(), w.m.rows(), /*orthonormal=*/true);
    for (index_t c = 0; c < f.cols(); ++c) {
        for (index_t i = 0; i < f.rows(); ++i) f.at(i, c) = FxValue{w.m.at(c, i), w.fmt};
    }
    return f;
}

HooiResult hooi_real(const DenseTensor<double>& x, const TuckerRank& rank,
                     const HooiOptions& opt) {
    const index_t d = x.order();
    const double xns = frobenius_norm_sq({x.data(), static_cast<std::size_t>(x.size())});
    if (!(xns > 0.0)) throw std::invalid_argument("hooi: zero input tensor");

    HooiResult out;
    std::vector<FactorMatrix<double>> factors =
        (opt.init == HooiInit::kHosvd) ? hosvd_init(x, rank)
                                       : random_orthonormal_init(x.shape(), rank, opt.seed);
    const TtmPlan plan = plan_hooi_iteration(d, opt.warm_start);
    std::vector<Matrix<double>> w_prev(static_cast<std::size_t>(d));

    for (int iter = 1; iter <= opt.max_iters; ++iter) {
        SlotStore<double> store(&x, plan.slot_count);
        std::vector<int> iter_sweeps;
        iter_sweeps.reserve(static_cast<std::size_t>(d));
        double gns = 0.0;
        for (index_t k = 1; k <= d; ++k) {
            const ChainPlan& chain = plan.chains[static_cast<std::size_t>(k - 1)];
            for (const TtmStep& step : chain.steps) {
                if (!step.fresh) continue;
                store.put(step.output_slot,
                          ttm(store.get(step.input_slot), step.mode,
                              factors[static_cast<std::size_t>(step.mode - 1)],
                              /*transposed=*/true));
                ++out.stats.ttm_steps;
            }
            const DenseTensor<double>& bt = store.get(chain.result_slot);
            const index_t rk = rank.at(k);
            JacobiResult jr;
            if (opt.warm_start && iter >= 2) {
                const Matrix<double>& wp = w_prev[static_cast<std::size_t>(k - 1)];
                DenseTensor<double> pre = ttm(bt, k, basis_as_factor(wp), /*transposed=*/true);
                ++out.stats.warm_premultiplies;
                auto u = unfold(pre, k);
                Matrix<double> b0(u.rows, u.cols, std::move(u.data));
                jr = jacobi_sweeps(std::move(b0), wp,
                                   JacobiOptions{.max_sweeps = 1, .tol = opt.svd_tol});
            } else {
                auto u = unfold(bt, k);
                Matrix<double> b0(u.rows, u.cols, std::move(u.data));
                jr = jacobi_sweeps(std::move(b0), JacobiOptions{.max_sweeps = opt.max_sweeps_cold,
                                                                .tol = opt.svd_tol});
            }
            iter_sweeps.push_back(jr.sweeps);
            factors[static_cast<std::size_t>(k - 1)] = leading_factors(jr.w, jr.b, rk);
            if (k == d) {
                const Matrix<double> g = leading_rows(jr.b, rk);
                gns = frobenius_norm_sq({g.storage().data(), g.storage().size()});
            }
            if (opt.warm_start) w_prev[static_cast<std::size_t>(k - 1)] = std::move(jr.w);
        }
        out.stats.sweeps.push_back(std::move(iter_sweeps));
        out.stats.rel_error.push_back(100.0 * std::sqrt(std::max(0.0, xns - gns) / xns));
        out.stats.iterations = iter;
        if (error_converged(out.stats.rel_error, opt.tol)) {
            out.stats.converged = true;
            if (opt.stop_on_convergence) break;
        }
    }

    out.model.factors = std::move(factors);
    out.model.core = core_tensor(x, out.model.factors);
    out.model.scale = 1.0;
    return out;
}

HooiResult hooi_fixed(const DenseTensor<double>& x, const TuckerRank& rank,
                      const HooiOptions& opt) {
    const index_t d = x.order();
    const FxProfile& pf = opt.profile;
    HwConfig hw = opt.hw;
    hw.validate();

    HooiResult out;
    FxStats& fx = out.stats.fx;

    // Normalize so the largest magnitude hits the top representable value of
    // the tensor format exactly: quantizing the input can then never clip.
    double max_abs = 0.0;
    for (index_t i = 0; i < x.size(); ++i) max_abs = std::max(max_abs, std::fabs(x[i]));
    if (max_abs == 0.0) throw std::invalid_argument("hooi: zero input tensor");
    const double scale = max_abs / (1.0 - std::ldexp(1.0, -pf.tensor_fmt.frac_bits));

    DenseTensor<FxValue> xq(x.shape());
    for (index_t i = 0; i < x.size(); ++i) xq[i] = quantize(x[i] / scale, pf.tensor_fmt, &fx);
    double xns = 0.0;
    {
        std::vector<double> vals(static_cast<std::size_t>(xq.size()));
        for (index_t i = 0; i < xq.size(); ++i) vals[static_cast<std::size_t>(i)] =
            value_of(xq[i]);
        xns = frobenius_norm_sq(vals);
    }

    // Initial factors are produced in double precision, then quantized into
    // the matrix format (orthonormal entries always fit it).
    std::vector<FactorMatrix<FxValue>> factors(static_cast<std::size_t>(d));
    {
        const std::vector<FactorMatrix<double>> init =
            (opt.init == HooiInit::kHosvd) ? hosvd_init(x, rank)
                                           : random_orthonormal_init(x.shape(), rank, opt.seed);
        for (index_t k = 0; k < d; ++k) {
            const auto& a = init[static_cast<std::size_t>(k)];
            FactorMatrix<FxValue> q(a.rows(), a.cols(), a.orthonormal());
            for (index_t c = 0; c < a.cols(); ++c) {
                for (index_t i = 0; i < a.rows(); ++i) {
                    q.at(i, c) = quantize(a.at(i, c), pf.matrix_fmt, &fx);
                }
            }
            factors[static_cast<std::size_t>(k)] = std::move(q);
        }
    }

    const int tol_bits =
        opt.svd_tol_bits > 0 ? opt.svd_tol_bits : std::max(1, pf.matrix_fmt.frac_bits - 4);
    const TtmPlan plan = plan_hooi_iteration(d, opt.warm_start);
    std::vector<FxMatrix> w_prev(static_cast<std::size_t>(d));

    Matrix<std::int64_t> core_rows;  // last iteration's core, mode-d unfolding, product fmt
    for (int iter = 1; iter <= opt.max_iters; ++iter) {
        SlotStore<FxValue> store(&xq, plan.slot_count);
        std::vector<int> iter_sweeps;
        iter_sweeps.reserve(static_cast<std::size_t>(d));
        double gns = 0.0;
        for (index_t k = 1; k <= d; ++k) {
            const ChainPlan& chain = plan.chains[static_cast<std::size_t>(k - 1)];
            for (const TtmStep& step : chain.steps) {
                if (!step.fresh) continue;
                store.put(step.output_slot,
                          ttm_tiled(store.get(step.input_slot), step.mode,
                                    factors[static_cast<std::size_t>(step.mode - 1)],
                                    /*transposed=*/true, hw, pf, &fx));
                ++out.stats.ttm_steps;
            }
            const DenseTensor<FxValue>& bt = store.get(chain.result_slot);
            const index_t rk = rank.at(k);
            FxJacobiResult jr;
            if (opt.warm_start && iter >= 2) {
                const FxMatrix& wp = w_prev[static_cast<std::size_t>(k - 1)];
                // Basis pre-multiply runs on the tiled kernel with the wide
                // accumulator format kept on the output, so matrix-memory
                // loading (block exponent) happens after it.
                DenseTensor<FxValue> pre = ttm_tiled(bt, k, basis_as_factor(wp),
                                                     /*transposed=*/true, hw, pf, &fx,
                                                     pf.product_fmt);
                ++out.stats.warm_premultiplies;
                FxMatrix b0 = fx_load_matrix(unfold(pre, k), pf.matrix_fmt, &fx);
                jr = jacobi_sweeps(std::move(b0), wp,
                                   FxJacobiOptions{.max_sweeps = 1, .tol_bits = tol_bits,
                                                   .profile = pf},
                                   &fx);
            } else {
                FxMatrix b0 = fx_load_matrix(unfold(bt, k), pf.matrix_fmt, &fx);
                jr = jacobi_sweeps(std::move(b0),
                                   FxJacobiOptions{.max_sweeps = opt.max_sweeps_cold,
                                                   .tol_bits = tol_bits, .profile = pf},
                                   &fx);
            }
            iter_sweeps.push_back(jr.sweeps);
            factors[static_cast<std::size_t>(k - 1)] = fx_leading_factors(jr.w, jr.b, rk);
            if (k == d) {
                // The iteration's core is the dominant rows of the rotated
                // matrix, widened to the product format (block exponent
                // folded back in).
                const FxMatrix g = fx_leading_rows(jr.b, rk);
                const int shift = g.fmt.frac_bits - pf.product_fmt.frac_bits - g.scale_log2;
                core_rows = Matrix<std::int64_t>(g.m.rows(), g.m.cols());
                std::vector<double> vals(g.m.storage().size());
                for (std::size_t i = 0; i < g.m.storage().size(); ++i) {
                    const std::int64_t raw = detail::saturate(
                        detail::rne_shift_right(g.m.storage()[i], shift), pf.product_fmt, &fx,
                        FxStage::kConvert);
                    core_rows.storage()[i] = raw;
                    vals[i] = std::ldexp(static_cast<double>(raw), -pf.product_fmt.frac_bits);
                }
                gns = frobenius_norm_sq(vals);
            }
            w_prev[static_cast<std::size_t>(k - 1)] = std::move(jr.w);
        }
        out.stats.sweeps.push_back(std::move(iter_sweeps));
        out.stats.rel_error.push_back(100.0 * std::sqrt(std::max(0.0, xns - gns) / xns));
        out.stats.iterations = iter;
        if (error_converged(out.stats.rel_error, opt.tol)) {
            out.stats.converged = true;
            if (opt.stop_on_convergence) break;
        }
    }

    // Convert the model to double; the core also folds the input
    // normalization back in so the model reconstructs in input units.
    out.model.factors.reserve(static_cast<std::size_t>(d));
    for (index_t k = 0; k < d; ++k) {
        const auto& q = factors[static_cast<std::size_t>(k)];
        FactorMatrix<double> a(q.rows(), q.cols(), q.orthonormal());
        for (index_t c = 0; c < q.cols(); ++c) {
            for (index_t i = 0; i < q.rows(); ++i) a.at(i, c) = value_of(q.at(i, c));
        }
        out.model.factors.push_back(std::move(a));
    }
    {
        UnfoldedMatrix<double> u;
        u.rows = core_rows.rows();
        u.cols = core_rows.cols();
        u.mode = d;
        u.shape = TensorShape(rank.r);
        u.data.resize(core_rows.storage().size());
        for (std::size_t i = 0; i < u.data.size(); ++i) {
            u.data[i] = std::ldexp(static_cast<double>(core_rows.storage()[i]),
                                   -pf.product_fmt.frac_bits) *
                        scale;
        }
        out.model.core = fold(u);
    }
    out.model.scale = scale;
    return out;
}

}  // namespace

HooiResult hooi(const DenseTensor<double>& x, const TuckerRank& rank, const HooiOptions& opt) {
    if (x.order() < 1) throw std::invalid_argument("hooi: empty tensor");
    rank.validate(x.shape());
    check_input(x);
    if (opt.max_iters < 1) throw std::invalid_argument("hooi: max_iters must be >= 1");
    if (opt.path == NumericPath::kFixed) return hooi_fixed(x, rank, opt);
    return hooi_real(x, rank, opt);
}

}  // namespace tuckersim
