// SPDX-License-Identifier: MIT
#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Matrix<T>: row-major working matrix.  Sweep algorithms rotate whole rows,
// so rows are contiguous.  0-based accessors.
// ---------------------------------------------------------------------------
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(index_t rows, index_t cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows * cols), T{}) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("Matrix: negative dimension");
    }
    Matrix(index_t rows, index_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (static_cast<index_t>(data_.size()) != rows * cols)
            throw std::invalid_argument("Matrix: buffer size does not match dimensions");
    }

    [[nodiscard]] index_t rows() const { return rows_; }
    [[nodiscard]] index_t cols() const { return cols_; }

    [[nodiscard]] T& at(index_t r, index_t c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }
    [[nodiscard]] const T& at(index_t r, index_t c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(r * cols_ + c)];
    }

    [[nodiscard]] std::span<T> row(index_t r) {
        assert(r >= 0 && r < rows_);
        return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }
    [[nodiscard]] std::span<const T> row(index_t r) const {
        assert(r >= 0 && r < rows_);
        return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
    }

    [[nodiscard]] std::vector<T>& storage() { return data_; }
    [[nodiscard]] const std::vector<T>& storage() const { return data_; }

    [[nodiscard]] static Matrix identity(index_t n, T one, T zero = T{}) {
        Matrix m(n, n);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j) m.at(i, j) = (i == j) ? one : zero;
        return m;
    }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<T> data_;
};

// ---------------------------------------------------------------------------
// FactorMatrix<T>: a mode factor with `rows` = mode extent I_k and `cols` =
// rank R_k.  Column-major so each basis column is contiguous.  The
// orthonormal flag is maintained by the factories that can guarantee it.
// ---------------------------------------------------------------------------
template <typename T>
class FactorMatrix {
public:
    FactorMatrix() = default;
    FactorMatrix(index_t rows, index_t cols, bool orthonormal = false)
        : rows_(rows), cols_(cols), orthonormal_(orthonormal),
          data_(static_cast<std::size_t>(rows * cols), T{}) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("FactorMatrix: dimensions must be positive");
    }

    [[nodiscard]] index_t rows() const { return rows_; }
    [[nodiscard]] index_t cols() const { return cols_; }
    [[nodiscard]] bool orthonormal() const { return orthonormal_; }
    void set_orthonormal(bool v) { orthonormal_ = v; }

    [[nodiscard]] T& at(index_t r, index_t c) {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(c * rows_ + r)];
    }
    [[nodiscard]] const T& at(index_t r, index_t c) const {
        assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
        return data_[static_cast<std::size_t>(c * rows_ + r)];
    }

    [[nodiscard]] std::span<T> col(index_t c) {
        assert(c >= 0 && c < cols_);
        return {data_.data() + c * rows_, static_cast<std::size_t>(rows_)};
    }
    [[nodiscard]] std::span<const T> col(index_t c) const {
        assert(c >= 0 && c < cols_);
        return {data_.data() + c * rows_, static_cast<std::size_t>(rows_)};
    }

    [[nodiscard]] std::vector<T>& storage() { return data_; }
    [[nodiscard]] const std::vector<T>& storage() const { return data_; }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    bool orthonormal_ = false;
    std::vector<T> data_;
};

}  // namespace tuckersim
