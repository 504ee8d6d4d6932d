// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tuckersim {

using index_t = std::int64_t;

// ---------------------------------------------------------------------------
// TensorShape
//
// Describes the extents of a dense order-d tensor.  Storage is mode-1-major:
// the first index varies fastest, so the flat offset of the 1-based index
// tuple (i_1, ..., i_d) is
//
//     offset = sum_k (i_k - 1) * prod_{n < k} I_n.
//
// All public index and mode arguments are 1-based; offsets are 0-based.
// ---------------------------------------------------------------------------
class TensorShape {
public:
    TensorShape() = default;

    explicit TensorShape(std::vector<index_t> extents)
        : extents_(std::move(extents)) {
        if (extents_.empty())
            throw std::invalid_argument("TensorShape: order must be at least 1");
        if (static_cast<index_t>(extents_.size()) > max_order())
            throw std::invalid_argument(
                "TensorShape: order " + std::to_string(extents_.size()) +
                " exceeds the configured maximum of " + std::to_string(max_order()));
        index_t count = 1;
        for (std::size_t k = 0; k < extents_.size(); ++k) {
            const index_t e = extents_[k];
            if (e < 1)
                throw std::invalid_argument("TensorShape: extent of mode " +
                                            std::to_string(k + 1) + " must be positive");
            if (count > kMaxElements / e)
                throw std::invalid_argument("TensorShape: element count overflows at mode " +
                                            std::to_string(k + 1));
            count *= e;
        }
        element_count_ = count;
    }

    /// Largest supported order.  Settable for stress tests; defaults to 8.
    [[nodiscard]] static index_t max_order() { return max_order_; }
    static void set_max_order(index_t order) {
        if (order < 1) throw std::invalid_argument("max_order must be positive");
        max_order_ = order;
    }

    [[nodiscard]] index_t order() const { return static_cast<index_t>(extents_.size()); }
    [[nodiscard]] const std::vector<index_t>& extents() const { return extents_; }
    [[nodiscard]] index_t element_count() const { return element_count_; }

    /// Extent of `mode` (1-based).
    [[nodiscard]] index_t extent(index_t mode) const {
        check_mode(mode);
        return extents_[static_cast<std::size_t>(mode - 1)];
    }

    /// Distance in the flat buffer between consecutive values of `mode`:
    /// prod_{n < mode} I_n.
    [[nodiscard]] index_t stride(index_t mode) const {
        check_mode(mode);
        index_t s = 1;
        for (index_t n = 1; n < mode; ++n) s *= extents_[static_cast<std::size_t>(n - 1)];
        return s;
    }

    /// Flat offset of a 1-based index tuple.  Bounds-checked.
    [[nodiscard]] index_t linear_offset(std::span<const index_t> indices) const {
        if (static_cast<index_t>(indices.size()) != order())
            throw std::invalid_argument("linear_offset: expected " + std::to_string(order()) +
                                        " indices, got " + std::to_string(indices.size()));
        index_t offset = 0;
        index_t stride = 1;
        for (index_t k = 1; k <= order(); ++k) {
            const index_t i = indices[static_cast<std::size_t>(k - 1)];
            const index_t e = extents_[static_cast<std::size_t>(k - 1)];
            if (i < 1 || i > e)
                throw std::out_of_range("linear_offset: index " + std::to_string(i) +
                                        " out of range [1, " + std::to_string(e) +
                                        "] for mode " + std::to_string(k));
            offset += (i - 1) * stride;
            stride *= e;
        }
        return offset;
    }

    void check_mode(index_t mode) const {
        if (mode < 1 || mode > order())
            throw std::out_of_range("mode " + std::to_string(mode) +
                                    " out of range [1, " + std::to_string(order()) + "]");
    }

    bool operator==(const TensorShape& other) const { return extents_ == other.extents_; }
    bool operator!=(const TensorShape& other) const { return !(*this == other); }

    [[nodiscard]] std::string to_string() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t k = 0; k < extents_.size(); ++k) {
            if (k) os << ",";
            os << extents_[k];
        }
        os << "]";
        return os.str();
    }

private:
    static constexpr index_t kMaxElements = index_t{1} << 48;
    static inline index_t max_order_ = 8;

    std::vector<index_t> extents_;
    index_t element_count_ = 0;
};

// ---------------------------------------------------------------------------
// DenseTensor<T>
//
// Flat mode-1-major element buffer.  T is a numeric scalar (float, double)
// or FxValue; all structural operations below are scalar agnostic.
// ---------------------------------------------------------------------------
template <typename T>
class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(TensorShape shape)
        : shape_(std::move(shape)),
          data_(static_cast<std::size_t>(shape_.element_count()), T{}) {}

    DenseTensor(TensorShape shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<index_t>(data_.size()) != shape_.element_count())
            throw std::invalid_argument("DenseTensor: buffer holds " +
                                        std::to_string(data_.size()) + " elements, shape " +
                                        shape_.to_string() + " needs " +
                                        std::to_string(shape_.element_count()));
    }

    [[nodiscard]] const TensorShape& shape() const { return shape_; }
    [[nodiscard]] index_t order() const { return shape_.order(); }
    [[nodiscard]] index_t size() const { return static_cast<index_t>(data_.size()); }

    [[nodiscard]] T& at(std::span<const index_t> indices) {
        return data_[static_cast<std::size_t>(shape_.linear_offset(indices))];
    }
    [[nodiscard]] const T& at(std::span<const index_t> indices) const {
        return data_[static_cast<std::size_t>(shape_.linear_offset(indices))];
    }

    /// Convenience accessor: x.at(i, j, k) with 1-based indices.
    template <typename... I>
    [[nodiscard]] T& at(I... indices) {
        const std::array<index_t, sizeof...(I)> idx{static_cast<index_t>(indices)...};
        return at(std::span<const index_t>(idx));
    }
    template <typename... I>
    [[nodiscard]] const T& at(I... indices) const {
        const std::array<index_t, sizeof...(I)> idx{static_cast<index_t>(indices)...};
        return at(std::span<const index_t>(idx));
    }

    /// 0-based flat access, unchecked except by the vector itself.
    [[nodiscard]] T& operator[](index_t flat) { return data_[static_cast<std::size_t>(flat)]; }
    [[nodiscard]] const T& operator[](index_t flat) const {
        return data_[static_cast<std::size_t>(flat)];
    }

    [[nodiscard]] T* data() { return data_.data(); }
    [[nodiscard]] const T* data() const { return data_.data(); }
    [[nodiscard]] auto begin() { return data_.begin(); }
    [[nodiscard]] auto end() { return data_.end(); }
    [[nodiscard]] auto begin() const { return data_.begin(); }
    [[nodiscard]] auto end() const { return data_.end(); }

private:
    TensorShape shape_;
    std::vector<T> data_;
};

// ---------------------------------------------------------------------------
// UnfoldedMatrix<T>
//
// Mode-k unfolding of a tensor: rows are indexed by i_k, and the 1-based
// column of the remaining indices is
//
//     j = 1 + sum_{m != k} (i_m - 1) * prod_{n < m, n != k} I_n.
//
// Rows are stored contiguously (row-major) so sweep algorithms that walk
// whole rows touch sequential memory.  `shape` remembers the source tensor
// so fold() can invert the operation exactly.
// ---------------------------------------------------------------------------
template <typename T>
struct UnfoldedMatrix {
    index_t rows = 0;
    index_t cols = 0;
    index_t mode = 0;       // which mode was unfolded (1-based)
    TensorShape shape;      // shape of the source tensor
    std::vector<T> data;    // row-major, rows * cols

    [[nodiscard]] T& at(index_t r, index_t c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[static_cast<std::size_t>(r * cols + c)];
    }
    [[nodiscard]] const T& at(index_t r, index_t c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[static_cast<std::size_t>(r * cols + c)];
    }
    [[nodiscard]] std::span<T> row(index_t r) {
        return {data.data() + r * cols, static_cast<std::size_t>(cols)};
    }
    [[nodiscard]] std::span<const T> row(index_t r) const {
        return {data.data() + r * cols, static_cast<std::size_t>(cols)};
    }
};

// ---------------------------------------------------------------------------
// Structural operations
// ---------------------------------------------------------------------------

/// Reorders modes.  `perm` lists, for each output mode, the 1-based source
/// mode it takes: Y(q_1, ..., q_d) = X(p) with p_{perm[j]} = q_j.
template <typename T>
[[nodiscard]] DenseTensor<T> permute(const DenseTensor<T>& x, std::span<const index_t> perm) {
    const index_t d = x.order();
    if (static_cast<index_t>(perm.size()) != d)
        throw std::invalid_argument("permute: permutation has " + std::to_string(perm.size()) +
                                    " entries, tensor has order " + std::to_string(d));
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    for (index_t j = 0; j < d; ++j) {
        const index_t p = perm[static_cast<std::size_t>(j)];
        if (p < 1 || p > d || seen[static_cast<std::size_t>(p - 1)])
            throw std::invalid_argument("permute: invalid or repeated mode " + std::to_string(p));
        seen[static_cast<std::size_t>(p - 1)] = true;
    }

    std::vector<index_t> out_extents(static_cast<std::size_t>(d));
    for (index_t j = 0; j < d; ++j)
        out_extents[static_cast<std::size_t>(j)] =
            x.shape().extent(perm[static_cast<std::size_t>(j)]);
    DenseTensor<T> y{TensorShape(out_extents)};

    // Walk the output in flat order; map each output tuple back to the input.
    const index_t n = y.size();
    std::vector<index_t> out_idx(static_cast<std::size_t>(d), 1);
    std::vector<index_t> in_strides(static_cast<std::size_t>(d));
    for (index_t k = 1; k <= d; ++k)
        in_strides[static_cast<std::size_t>(k - 1)] = x.shape().stride(k);

    for (index_t flat = 0; flat < n; ++flat) {
        index_t in_off = 0;
        for (index_t j = 0; j < d; ++j) {
            const index_t src_mode = perm[static_cast<std::size_t>(j)];
            in_off += (out_idx[static_cast<std::size_t>(j)] - 1) *
                      in_strides[static_cast<std::size_t>(src_mode - 1)];
        }
        y[flat] = x[in_off];

        for (index_t j = 0; j < d; ++j) {
            auto& q = out_idx[static_cast<std::size_t>(j)];
            if (++q <= out_extents[static_cast<std::size_t>(j)]) break;
            q = 1;
        }
    }
    return y;
}

/// Mode-k unfolding.  See UnfoldedMatrix for the column map.
template <typename T>
[[nodiscard]] UnfoldedMatrix<T> unfold(const DenseTensor<T>& x, index_t mode) {
    x.shape().check_mode(mode);
    const index_t rows = x.shape().extent(mode);
    const index_t cols = x.shape().element_count() / rows;

    UnfoldedMatrix<T> u;
    u.rows = rows;
    u.cols = cols;
    u.mode = mode;
    u.shape = x.shape();
    u.data.resize(static_cast<std::size_t>(rows * cols));

    // The flat mode-1-major offset decomposes as
    //   offset = lo + i_k * lead + hi * lead * I_k     (0-based i_k)
    // where lead = prod_{n<k} I_n.  The unfolding column in Eq-form is then
    // j = lo + hi * lead, i.e. dropping mode k compacts the strides.
    const index_t lead = x.shape().stride(mode);
    const index_t trail = cols / lead;
    for (index_t hi = 0; hi < trail; ++hi)
        for (index_t ik = 0; ik < rows; ++ik)
            for (index_t lo = 0; lo < lead; ++lo) {
                const index_t col = lo + hi * lead;
                u.data[static_cast<std::size_t>(ik * cols + col)] =
                    x[lo + ik * lead + hi * lead * rows];
            }
    return u;
}

/// Inverse of unfold(): rebuilds the tensor recorded in `u.shape`.
template <typename T>
[[nodiscard]] DenseTensor<T> fold(const UnfoldedMatrix<T>& u) {
    u.shape.check_mode(u.mode);
    const index_t rows = u.shape.extent(u.mode);
    const index_t cols = u.shape.element_count() / rows;
    if (rows != u.rows || cols != u.cols)
        throw std::invalid_argument("fold: matrix is " + std::to_string(u.rows) + "x" +
                                    std::to_string(u.cols) + ", mode " + std::to_string(u.mode) +
                                    " of shape " + u.shape.to_string() + " needs " +
                                    std::to_string(rows) + "x" + std::to_string(cols));

    DenseTensor<T> x{u.shape};
    const index_t lead = u.shape.stride(u.mode);
    const index_t trail = cols / lead;
    for (index_t hi = 0; hi < trail; ++hi)
        for (index_t ik = 0; ik < rows; ++ik)
            for (index_t lo = 0; lo < lead; ++lo)
                x[lo + ik * lead + hi * lead * rows] =
                    u.data[static_cast<std::size_t>(ik * cols + lo + hi * lead)];
    return x;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

// Neumaier-compensated sum of squares: fit-error computations subtract
// nearly equal squared norms, so the summation error must stay near one ulp
// regardless of element count.
[[nodiscard]] inline double frobenius_norm_sq(std::span<const double> v) {
    double s = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double term = x * x;
        const double t = s + term;
        if (std::fabs(s) >= std::fabs(term)) {
            comp += (s - t) + term;
        } else {
            comp += (term - t) + s;
        }
        s = t;
    }
    return s + comp;
}

[[nodiscard]] inline double frobenius_norm(const DenseTensor<double>& x) {
    return std::sqrt(frobenius_norm_sq({x.data(), static_cast<std::size_t>(x.size())}));
}

[[nodiscard]] inline double frobenius_norm(const UnfoldedMatrix<double>& u) {
    return std::sqrt(frobenius_norm_sq(u.data));
}

/// ||x - y||_F / ||x||_F (a plain ratio, not a percentage) with compensated
/// accumulation of the difference.  Shapes must match; a zero reference norm
/// yields the absolute error norm.
[[nodiscard]] inline double relative_diff(const DenseTensor<double>& x,
                                          const DenseTensor<double>& y) {
    if (x.shape() != y.shape())
        throw std::invalid_argument("relative_diff: shape mismatch " + x.shape().to_string() +
                                    " vs " + y.shape().to_string());
    double s = 0.0;
    double comp = 0.0;
    for (index_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - y.data()[i];
        const double term = d * d;
        const double t = s + term;
        if (std::fabs(s) >= std::fabs(term)) {
            comp += (s - t) + term;
        } else {
            comp += (term - t) + s;
        }
        s = t;
    }
    const double diff = std::sqrt(s + comp);
    const double ref = frobenius_norm(x);
    return ref > 0.0 ? diff / ref : diff;
}

}  // namespace tuckersim
