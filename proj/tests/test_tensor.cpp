// SPDX-License-Identifier: MIT
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tuckersim/tensor.hpp"

using namespace tuckersim;

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(TensorShape(std::vector<index_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(TensorShape({0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(TensorShape({3, -1}), std::invalid_argument);
    CHECK_THROWS_AS(TensorShape({1, 2, 3, 4, 5, 6, 7, 8, 9}), std::invalid_argument);

    const TensorShape s({4, 3, 2});
    CHECK(s.order() == 3);
    CHECK(s.extent(1) == 4);
    CHECK(s.extent(3) == 2);
    CHECK(s.element_count() == 24);
    CHECK_THROWS_AS((void)s.extent(0), std::out_of_range);
    CHECK_THROWS_AS((void)s.extent(4), std::out_of_range);
}

TEST_CASE("linear offset is mode-1-major") {
    const TensorShape s({2, 2, 2});
    // Index (2,1,2): offset = (2-1)*1 + (1-1)*2 + (2-1)*4 = 5.
    const std::vector<index_t> idx{2, 1, 2};
    CHECK(s.linear_offset(idx) == 5);

    const std::vector<index_t> first{1, 1, 1};
    CHECK(s.linear_offset(first) == 0);
    const std::vector<index_t> last{2, 2, 2};
    CHECK(s.linear_offset(last) == 7);

    const std::vector<index_t> bad{3, 1, 1};
    CHECK_THROWS_AS((void)s.linear_offset(bad), std::out_of_range);
}

TEST_CASE("stride products") {
    const TensorShape s({4, 3, 2});
    CHECK(s.stride(1) == 1);
    CHECK(s.stride(2) == 4);
    CHECK(s.stride(3) == 12);
}

TEST_CASE("flat enumeration walks the first index fastest") {
    DenseTensor<double> x(TensorShape({2, 2, 2}));
    for (index_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(i);
    CHECK(x.at(1, 1, 1) == 0.0);
    CHECK(x.at(2, 1, 1) == 1.0);
    CHECK(x.at(1, 2, 1) == 2.0);
    CHECK(x.at(1, 1, 2) == 4.0);
    CHECK(x.at(2, 2, 2) == 7.0);
}

TEST_CASE("unfold column mapping for a 2x2x2 tensor") {
    DenseTensor<double> x(TensorShape({2, 2, 2}));
    for (index_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(i + 10);

    // Element (2,1,2) sits at row 2 / column 3 of the mode-1 unfolding and at
    // row 1 / column 4 of the mode-2 unfolding (1-based positions; the
    // column index is built from the remaining indices with lower modes
    // varying fastest).
    const auto u1 = unfold(x, 1);
    CHECK(u1.rows == 2);
    CHECK(u1.cols == 4);
    CHECK(u1.at(2 - 1, 3 - 1) == x.at(2, 1, 2));

    const auto u2 = unfold(x, 2);
    CHECK(u2.at(1 - 1, 4 - 1) == x.at(2, 1, 2));

    const auto u3 = unfold(x, 3);
    CHECK(u3.rows == 2);
    // mode 3: column = i1 + (i2-1)*2 -> (2,1,2) lands at row 2, column 2.
    CHECK(u3.at(2 - 1, 2 - 1) == x.at(2, 1, 2));
}

TEST_CASE("fold inverts unfold on every mode for random shapes") {
    oracle::Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const index_t d = rng.uniform_int(1, 4);
        std::vector<index_t> dims;
        for (index_t k = 0; k < d; ++k) dims.push_back(rng.uniform_int(1, 6));
        const auto x = oracle::random_tensor(TensorShape(dims), rng);
        for (index_t mode = 1; mode <= d; ++mode) {
            const auto u = unfold(x, mode);
            const auto y = fold(u);
            REQUIRE(y.shape() == x.shape());
            for (index_t i = 0; i < x.size(); ++i) CHECK(y.data()[i] == x.data()[i]);
        }
    }
}

TEST_CASE("permute roundtrip restores the tensor") {
    oracle::Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const index_t d = rng.uniform_int(2, 4);
        std::vector<index_t> dims;
        for (index_t k = 0; k < d; ++k) dims.push_back(rng.uniform_int(1, 5));
        const auto x = oracle::random_tensor(TensorShape(dims), rng);

        std::vector<index_t> perm(static_cast<std::size_t>(d));
        std::iota(perm.begin(), perm.end(), index_t{1});
        for (index_t k = d - 1; k > 0; --k) {
            std::swap(perm[static_cast<std::size_t>(k)],
                      perm[static_cast<std::size_t>(rng.uniform_int(0, k))]);
        }
        const auto y = permute(x, perm);

        // Invert the permutation and verify a perfect roundtrip.
        std::vector<index_t> inverse(static_cast<std::size_t>(d));
        for (index_t k = 0; k < d; ++k) {
            inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)] - 1)] = k + 1;
        }
        const auto z = permute(y, inverse);
        REQUIRE(z.shape() == x.shape());
        for (index_t i = 0; i < x.size(); ++i) CHECK(z.data()[i] == x.data()[i]);
    }
}

TEST_CASE("permute moves elements to permuted coordinates") {
    DenseTensor<double> x(TensorShape({3, 4, 2}));
    for (index_t i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(i);
    const std::vector<index_t> perm{3, 1, 2};  // y(i3, i1, i2) = x(i1, i2, i3)
    const auto y = permute(x, perm);
    CHECK(y.shape().extents() == std::vector<index_t>{2, 3, 4});
    for (index_t a = 1; a <= 3; ++a) {
        for (index_t b = 1; b <= 4; ++b) {
            for (index_t c = 1; c <= 2; ++c) CHECK(y.at(c, a, b) == x.at(a, b, c));
        }
    }
}

TEST_CASE("frobenius norm") {
    DenseTensor<double> ones(TensorShape({2, 2, 2}));
    for (index_t i = 0; i < ones.size(); ++i) ones.data()[i] = 1.0;
    CHECK(frobenius_norm(ones) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));

    oracle::Rng rng(7);
    const auto x = oracle::random_tensor(TensorShape({5, 4, 3}), rng);
    for (index_t mode = 1; mode <= 3; ++mode) {
        CHECK(frobenius_norm(unfold(x, mode)) ==
              doctest::Approx(frobenius_norm(x)).epsilon(1e-15));
    }
}

TEST_CASE("compensated sum of squares stays exact-scale on adversarial data") {
    // One giant value followed by many tiny ones: a plain running sum loses
    // every tiny term, compensation keeps them.
    std::vector<double> v(1001, 1e-8);  // squares are 1e-16 each
    v[0] = 1.0;
    const double got = frobenius_norm_sq(v);
    CHECK(got == doctest::Approx(1.0 + 1000 * 1e-16).epsilon(1e-15));
    CHECK(got > 1.0);  // the naive sum would collapse to exactly 1.0
}

TEST_CASE("relative_diff") {
    oracle::Rng rng(13);
    const auto x = oracle::random_tensor(TensorShape({4, 4, 4}), rng);
    CHECK(relative_diff(x, x) == 0.0);

    auto y = x;
    y.data()[0] += 0.5;
    CHECK(relative_diff(x, y) > 0.0);

    const auto z = oracle::random_tensor(TensorShape({4, 4}), rng);
    CHECK_THROWS_AS((void)relative_diff(x, z), std::invalid_argument);
}
