// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tuckersim/jacobi_svd.hpp"
#include "tuckersim/tensor.hpp"

using namespace tuckersim;

// ---------------------------------------------------------------------------
// Pair schedule
// ---------------------------------------------------------------------------

TEST_CASE("schedule for n=4 is the classic tournament") {
    const auto rounds = round_robin_schedule(4);
    REQUIRE(rounds.size() == 3);
    const PairRound want0{{0, 1}, {2, 3}};
    const PairRound want1{{0, 2}, {1, 3}};
    const PairRound want2{{0, 3}, {1, 2}};
    CHECK(rounds[0] == want0);
    CHECK(rounds[1] == want1);
    CHECK(rounds[2] == want2);
}

TEST_CASE("schedule covers every pair exactly once with disjoint rounds") {
    for (index_t n = 2; n <= 64; ++n) {
        const auto rounds = round_robin_schedule(n);
        std::set<std::pair<index_t, index_t>> seen;
        for (const auto& round : rounds) {
            std::set<index_t> touched;
            for (const auto& [i, j] : round) {
                CHECK(i < j);
                CHECK(j < n);
                CHECK(touched.insert(i).second);  // disjoint within the round
                CHECK(touched.insert(j).second);
                CHECK(seen.insert({i, j}).second);  // unique across the sweep
            }
        }
        CHECK(seen.size() == static_cast<std::size_t>(n * (n - 1) / 2));
    }
    CHECK_THROWS_AS((void)round_robin_schedule(1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Rotation parameters and application
// ---------------------------------------------------------------------------

TEST_CASE("moments and angle for a hand-evaluated pair") {
    // Rows (1,0) and (1,1): alpha=1, beta=2, gamma=1,
    // theta = atan2(2, 1)/2 = 0.55357435889704525...
    Matrix<double> b(2, 2, {1, 0, 1, 1});
    const auto p = rotation_params(b.row(0), b.row(1));
    CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.beta == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.theta == doctest::Approx(0.55357435889704525).epsilon(1e-13));
    CHECK(p.c == doctest::Approx(std::cos(p.theta)).epsilon(1e-15));
    CHECK(p.s == doctest::Approx(std::sin(p.theta)).epsilon(1e-15));
}

TEST_CASE("angle always lands in [-pi/4, pi/4]") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        auto b = oracle::random_matrix(2, 6, rng);
        const auto p = rotation_params(b.row(0), b.row(1));
        CHECK(std::fabs(p.theta) <= 0.25 * 3.14159265358979323846 + 1e-12);
    }
}

TEST_CASE("one rotation orthogonalizes its pair and preserves structure") {
    oracle::Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        auto b = oracle::random_matrix(4, 8, rng);
        auto w = Matrix<double>::identity(4, 1.0);
        const double norm_before = frobenius_norm_sq(b.storage());

        const index_t i = 1;
        const index_t j = 3;
        const auto p = rotation_params(b.row(i), b.row(j));
        apply_rotation(b, w, i, j, p.c, p.s);

        // The rotated pair is orthogonal.
        double dot = 0.0;
        for (index_t k = 0; k < b.cols(); ++k) dot += b.at(i, k) * b.at(j, k);
        const double scale = std::sqrt((p.alpha + 1e-30) * (p.beta + 1e-30));
        CHECK(std::fabs(dot) <= 1e-10 * std::max(1.0, scale));

        // Frobenius norm is invariant and W stays orthonormal.
        CHECK(frobenius_norm_sq(b.storage()) ==
              doctest::Approx(norm_before).epsilon(1e-13));
        CHECK(oracle::row_orthonormality_error(w) < 1e-13);
    }
}

// ---------------------------------------------------------------------------
// Full sweeps, real path
// ---------------------------------------------------------------------------

TEST_CASE("singular values match the Gram-matrix eigensolver") {
    oracle::Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const index_t n = rng.uniform_int(2, 12);
        const index_t cols = rng.uniform_int(n, 48);
        const auto b0 = oracle::random_matrix(n, cols, rng);

        const auto res = jacobi_sweeps(b0);
        REQUIRE(res.converged);

        // Row norms of the rotated matrix, descending = singular values.
        std::vector<double> sigma;
        for (index_t i = 0; i < n; ++i) {
            sigma.push_back(std::sqrt(frobenius_norm_sq(res.b.row(i))));
        }
        std::sort(sigma.begin(), sigma.end(), std::greater<>());

        const auto want = oracle::singular_values_reference(b0);
        const double scale = std::max(1.0, want[0]);
        for (index_t i = 0; i < n; ++i) {
            CHECK(std::fabs(sigma[static_cast<std::size_t>(i)] -
                            want[static_cast<std::size_t>(i)]) <= 1e-8 * scale);
        }

        CHECK(oracle::row_orthonormality_error(res.w) < 1e-10);

        // W * B0 == B_final.
        double max_err = 0.0;
        for (index_t i = 0; i < n; ++i) {
            for (index_t c = 0; c < cols; ++c) {
                double sum = 0.0;
                for (index_t k = 0; k < n; ++k) sum += res.w.at(i, k) * b0.at(k, c);
                max_err = std::max(max_err, std::fabs(sum - res.b.at(i, c)));
            }
        }
        CHECK(max_err < 1e-10 * scale);
    }
}

TEST_CASE("degenerate inputs converge") {
    // A zero row never rotates against anything.
    Matrix<double> b(3, 4, {1, 2, 3, 4, 0, 0, 0, 0, 4, 3, 2, 1});
    const auto res = jacobi_sweeps(b);
    CHECK(res.converged);

    // Fewer than two rows is trivially converged.
    Matrix<double> single(1, 5, {1, 2, 3, 4, 5});
    const auto one = jacobi_sweeps(single);
    CHECK(one.converged);
    CHECK(one.sweeps == 0);
}

TEST_CASE("a converged basis warm-restarts without further rotations") {
    oracle::Rng rng(14);
    const auto b0 = oracle::random_matrix(6, 20, rng);
    const auto cold = jacobi_sweeps(b0);
    REQUIRE(cold.converged);

    JacobiOptions warm;
    warm.max_sweeps = 1;
    const auto again = jacobi_sweeps(cold.b, cold.w, warm);
    CHECK(again.converged);
    for (index_t i = 0; i < 6; ++i) {
        for (index_t c = 0; c < 20; ++c) CHECK(again.b.at(i, c) == cold.b.at(i, c));
        for (index_t c = 0; c < 6; ++c) CHECK(again.w.at(i, c) == cold.w.at(i, c));
    }
}

TEST_CASE("options are validated") {
    Matrix<double> b(2, 2, {1, 0, 0, 1});
    JacobiOptions bad;
    bad.max_sweeps = 0;
    CHECK_THROWS_AS((void)jacobi_sweeps(b, bad), std::invalid_argument);
    Matrix<double> w(3, 3);
    CHECK_THROWS_AS((void)jacobi_sweeps(b, w, JacobiOptions{}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Basis extraction
// ---------------------------------------------------------------------------

TEST_CASE("leading factors rank rows by norm with ties to the lower index") {
    // Rows of b_final have norms 2, 3, 3: ranking is row1, row2, row0
    // (equal norms keep index order).
    Matrix<double> bf(3, 2, {2, 0, 0, 3, 3, 0});
    Matrix<double> w(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});

    const auto order = row_order_by_norm(bf);
    REQUIRE(order == std::vector<index_t>{1, 2, 0});

    const auto f = leading_factors(w, bf, 2);
    CHECK(f.rows() == 3);
    CHECK(f.cols() == 2);
    CHECK(f.orthonormal());
    // Column 0 = row 1 of W, column 1 = row 2 of W.
    CHECK(f.at(1, 0) == 1.0);
    CHECK(f.at(2, 1) == 1.0);

    const auto rows = leading_rows(bf, 2);
    CHECK(rows.at(0, 1) == 3.0);
    CHECK(rows.at(1, 0) == 3.0);

    CHECK_THROWS_AS((void)leading_factors(w, bf, 4), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Fixed-point path
// ---------------------------------------------------------------------------

namespace {

DenseTensor<FxValue> quantize_rows(const Matrix<double>& m, FxFormat fmt, double scale) {
    DenseTensor<FxValue> t(TensorShape({m.rows(), m.cols()}));
    for (index_t i = 1; i <= m.rows(); ++i) {
        for (index_t j = 1; j <= m.cols(); ++j) {
            t.at(i, j) = quantize(m.at(i - 1, j - 1) / scale, fmt);
        }
    }
    return t;
}

}  // namespace

TEST_CASE("block-scaled load targets (0.25, 0.5] and never saturates") {
    oracle::Rng rng(15);
    for (double magnitude : {1e-3, 0.3, 1.0, 40.0, 2000.0}) {
        auto m = oracle::random_matrix(4, 9, rng);
        for (index_t i = 0; i < 4; ++i) {
            for (index_t j = 0; j < 9; ++j) m.at(i, j) *= magnitude;
        }
        const auto t = quantize_rows(m, FxFormat{16, 12}, 8.0 * magnitude);
        const auto u = unfold(t, 1);

        FxStats stats;
        const auto fx = fx_load_matrix(u, FxFormat{27, 24}, &stats);
        CHECK(stats.stages[static_cast<std::size_t>(FxStage::kConvert)].saturations == 0);

        double max_abs = 0.0;
        for (index_t i = 0; i < fx.m.rows(); ++i) {
            for (index_t j = 0; j < fx.m.cols(); ++j) {
                max_abs = std::max(max_abs,
                                   std::fabs(std::ldexp(static_cast<double>(fx.m.at(i, j)),
                                                        -fx.fmt.frac_bits)));
            }
        }
        CAPTURE(magnitude);
        CHECK(max_abs <= 0.5);
        CHECK(max_abs > 0.25);

        // value_at undoes the block scale.
        for (index_t i = 0; i < fx.m.rows(); ++i) {
            for (index_t j = 0; j < fx.m.cols(); ++j) {
                const double want = value_of(t.at(i + 1, j + 1));
                CHECK(fx.value_at(i, j) == doctest::Approx(want).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("mixed element formats are rejected at load") {
    DenseTensor<FxValue> t(TensorShape({2, 2}));
    t.at(1, 1) = quantize(0.5, FxFormat{16, 12});
    t.at(2, 1) = quantize(0.5, FxFormat{16, 12});
    t.at(1, 2) = quantize(0.5, FxFormat{16, 14});
    t.at(2, 2) = quantize(0.5, FxFormat{16, 12});
    const auto u = unfold(t, 1);
    CHECK_THROWS_AS((void)fx_load_matrix(u, FxFormat{27, 24}, nullptr), std::invalid_argument);
}

TEST_CASE("fixed-point sweeps track the real decomposition") {
    oracle::Rng rng(16);
    for (int trial = 0; trial < 8; ++trial) {
        const index_t n = rng.uniform_int(3, 8);
        const index_t cols = rng.uniform_int(n, 24);
        auto md = oracle::random_matrix(n, cols, rng);

        const auto t = quantize_rows(md, FxFormat{16, 12}, 8.0);
        Matrix<double> mq(n, cols);
        for (index_t i = 0; i < n; ++i) {
            for (index_t j = 0; j < cols; ++j) mq.at(i, j) = value_of(t.at(i + 1, j + 1));
        }

        FxStats stats;
        auto b0 = fx_load_matrix(unfold(t, 1), FxFormat{27, 24}, &stats);
        const auto fx = jacobi_sweeps(std::move(b0), FxJacobiOptions{}, &stats);
        CHECK(fx.converged);

        const auto real = jacobi_sweeps(mq);

        // Compare singular values: fx row norms carry the block scale.
        std::vector<double> got;
        for (index_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (index_t j = 0; j < cols; ++j) {
                const double v = fx.b.value_at(i, j);
                s += v * v;
            }
            got.push_back(std::sqrt(s));
        }
        std::sort(got.begin(), got.end(), std::greater<>());

        std::vector<double> want;
        for (index_t i = 0; i < n; ++i) {
            want.push_back(std::sqrt(frobenius_norm_sq(real.b.row(i))));
        }
        std::sort(want.begin(), want.end(), std::greater<>());

        const double scale = std::max(1.0, want[0]);
        for (index_t i = 0; i < n; ++i) {
            CHECK(std::fabs(got[static_cast<std::size_t>(i)] -
                            want[static_cast<std::size_t>(i)]) < 1e-4 * scale);
        }

        // W rows orthonormal within fixed-point resolution.
        Matrix<double> wd(n, n);
        for (index_t i = 0; i < n; ++i) {
            for (index_t j = 0; j < n; ++j) wd.at(i, j) = fx.w.value_at(i, j);
        }
        CHECK(oracle::row_orthonormality_error(wd) < 1e-4);
    }
}

TEST_CASE("fixed-point warm restart applies no rotation on a converged basis") {
    oracle::Rng rng(17);
    auto md = oracle::random_matrix(5, 12, rng);
    const auto t = quantize_rows(md, FxFormat{16, 12}, 8.0);

    FxStats stats;
    auto b0 = fx_load_matrix(unfold(t, 1), FxFormat{27, 24}, &stats);
    const auto cold = jacobi_sweeps(std::move(b0), FxJacobiOptions{}, &stats);
    REQUIRE(cold.converged);

    FxJacobiOptions warm;
    warm.max_sweeps = 1;
    const auto again = jacobi_sweeps(cold.b, cold.w, warm, &stats);
    CHECK(again.converged);
    for (index_t i = 0; i < 5; ++i) {
        for (index_t j = 0; j < 12; ++j) CHECK(again.b.m.at(i, j) == cold.b.m.at(i, j));
        for (index_t j = 0; j < 5; ++j) CHECK(again.w.m.at(i, j) == cold.w.m.at(i, j));
    }
}

TEST_CASE("fx identity and leading factor extraction") {
    const auto eye = fx_identity(4, FxFormat{27, 24});
    CHECK(eye.scale_log2 == 0);
    for (index_t i = 0; i < 4; ++i) {
        for (index_t j = 0; j < 4; ++j) {
            CHECK(eye.value_at(i, j) == (i == j ? 1.0 : 0.0));
        }
    }

    oracle::Rng rng(18);
    auto md = oracle::random_matrix(4, 10, rng);
    const auto t = quantize_rows(md, FxFormat{16, 12}, 8.0);
    FxStats stats;
    auto b0 = fx_load_matrix(unfold(t, 1), FxFormat{27, 24}, &stats);
    const auto res = jacobi_sweeps(std::move(b0), FxJacobiOptions{}, &stats);

    const auto f = fx_leading_factors(res.w, res.b, 2);
    CHECK(f.rows() == 4);
    CHECK(f.cols() == 2);
    // Columns must be the top-ranked rows of W.
    const auto order = row_order_by_norm(res.b);
    for (index_t c = 0; c < 2; ++c) {
        for (index_t i = 0; i < 4; ++i) {
            CHECK(value_of(f.at(i, c)) ==
                  doctest::Approx(res.w.value_at(order[static_cast<std::size_t>(c)], i))
                      .epsilon(1e-12));
        }
    }
}
