// SPDX-License-Identifier: MIT
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tuckersim/dtf.hpp"

using namespace tuckersim;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("dtf_test_" + name + ".dtf") {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("double tensors round-trip exactly") {
    oracle::Rng rng(31);
    TempFile f("f64");
    const auto x = oracle::random_tensor(TensorShape({5, 4, 3}), rng);
    write_dtf(f.path, x);

    const auto back = read_dtf(f.path);
    REQUIRE(std::holds_alternative<DenseTensor<double>>(back));
    const auto& y = std::get<DenseTensor<double>>(back);
    REQUIRE(y.shape().order() == 3);
    CHECK(y.shape().extent(1) == 5);
    CHECK(y.shape().extent(2) == 4);
    CHECK(y.shape().extent(3) == 3);
    for (index_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

    const auto d = read_dtf_as_double(f.path);
    for (index_t i = 0; i < x.size(); ++i) CHECK(d[i] == x[i]);
}

TEST_CASE("float tensors round-trip exactly") {
    TempFile f("f32");
    DenseTensor<float> x(TensorShape({3, 2}));
    const float vals[] = {1.5f, -2.25f, 0.0f, 1e-20f, -3.4e38f, 42.0f};
    for (index_t i = 0; i < x.size(); ++i) x[i] = vals[i];
    write_dtf(f.path, x);

    const auto back = read_dtf(f.path);
    REQUIRE(std::holds_alternative<DenseTensor<float>>(back));
    const auto& y = std::get<DenseTensor<float>>(back);
    for (index_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

    const auto d = read_dtf_as_double(f.path);
    for (index_t i = 0; i < x.size(); ++i) CHECK(d[i] == static_cast<double>(vals[i]));
}

TEST_CASE("fixed-point tensors round-trip raw words and formats") {
    TempFile f("fx");
    const FxFormat fmt{27, 24};
    DenseTensor<FxValue> x(TensorShape({2, 2}),
                           std::vector<FxValue>(4, FxValue{0, fmt}));
    x.at(1, 1) = quantize(0.5, fmt);
    x.at(2, 1) = quantize(-0.25, fmt);
    x.at(1, 2) = quantize(-1e-7, fmt);  // small negative: sign extension matters
    x.at(2, 2) = FxValue{(std::int64_t{1} << 26) - 1, fmt};  // rail
    write_dtf(f.path, x);

    // 27-bit words take 4 bytes each: header 7 + 2 fmt + 2 order + 16 dims
    // + 16 data.
    CHECK(slurp(f.path).size() == 4 + 2 + 1 + 2 + 2 + 2 * 8 + 4 * 4);

    const auto back = read_dtf(f.path);
    REQUIRE(std::holds_alternative<DenseTensor<FxValue>>(back));
    const auto& y = std::get<DenseTensor<FxValue>>(back);
    for (index_t i = 1; i <= 2; ++i) {
        for (index_t j = 1; j <= 2; ++j) {
            CHECK(y.at(i, j).raw == x.at(i, j).raw);
            CHECK(y.at(i, j).fmt.total_bits == fmt.total_bits);
            CHECK(y.at(i, j).fmt.frac_bits == fmt.frac_bits);
        }
    }

    const auto d = read_dtf_as_double(f.path);
    CHECK(d.at(1, 1) == 0.5);
    CHECK(d.at(2, 1) == -0.25);
    CHECK(d.at(1, 2) < 0.0);
}

TEST_CASE("narrow fixed words use the minimum byte count") {
    TempFile f("fx16");
    const FxFormat fmt{16, 12};
    DenseTensor<FxValue> x(TensorShape({3}), std::vector<FxValue>(3, FxValue{0, fmt}));
    x.at(1) = quantize(1.0, fmt);
    x.at(2) = quantize(-1.0, fmt);
    x.at(3) = quantize(0.125, fmt);
    write_dtf(f.path, x);
    CHECK(slurp(f.path).size() == 4 + 2 + 1 + 2 + 2 + 8 + 3 * 2);  // 2 bytes/elem

    const auto y = std::get<DenseTensor<FxValue>>(read_dtf(f.path));
    CHECK(value_of(y.at(1)) == 1.0);
    CHECK(value_of(y.at(2)) == -1.0);
    CHECK(value_of(y.at(3)) == 0.125);
}

TEST_CASE("high don't-care bits in the top byte are ignored on read") {
    TempFile f("mask");
    const FxFormat fmt{12, 8};  // 2-byte words, top 4 bits of byte 2 unused
    DenseTensor<FxValue> x(TensorShape({1}), std::vector<FxValue>(1, FxValue{0, fmt}));
    x.at(1) = quantize(-0.5, fmt);
    write_dtf(f.path, x);

    auto bytes = slurp(f.path);
    bytes[bytes.size() - 1] |= 0xF0;  // garbage above bit 11
    spit(f.path, bytes);

    const auto y = std::get<DenseTensor<FxValue>>(read_dtf(f.path));
    CHECK(value_of(y.at(1)) == -0.5);
}

TEST_CASE("writes are byte-deterministic") {
    oracle::Rng rng(32);
    TempFile a("det_a");
    TempFile b("det_b");
    const auto x = oracle::random_tensor(TensorShape({4, 4}), rng);
    write_dtf(a.path, x);
    write_dtf(b.path, x);
    CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("mixed-format fixed tensors are rejected at write") {
    TempFile f("mixed");
    DenseTensor<FxValue> x(TensorShape({2}), std::vector<FxValue>(2, FxValue{0, FxFormat{16, 12}}));
    x.at(2) = FxValue{0, FxFormat{16, 14}};
    CHECK_THROWS_AS(write_dtf(f.path, x), std::invalid_argument);
}

TEST_CASE("corrupt files raise I/O errors") {
    TempFile f("bad");
    oracle::Rng rng(33);
    const auto x = oracle::random_tensor(TensorShape({3, 3}), rng);
    write_dtf(f.path, x);
    const auto good = slurp(f.path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)read_dtf("no_such_file.dtf"), DtfError);
    }
    SUBCASE("bad magic") {
        auto bytes = good;
        bytes[0] = 'X';
        spit(f.path, bytes);
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("unsupported version") {
        auto bytes = good;
        bytes[4] = 9;
        spit(f.path, bytes);
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("unknown scalar code") {
        auto bytes = good;
        bytes[6] = 7;
        spit(f.path, bytes);
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("truncated header") {
        spit(f.path, std::vector<unsigned char>(good.begin(), good.begin() + 10));
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("truncated payload") {
        spit(f.path, std::vector<unsigned char>(good.begin(), good.end() - 3));
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("trailing garbage") {
        auto bytes = good;
        bytes.push_back(0);
        spit(f.path, bytes);
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
    SUBCASE("zero order") {
        auto bytes = good;
        bytes[7] = 0;
        bytes[8] = 0;
        spit(f.path, bytes);
        CHECK_THROWS_AS((void)read_dtf(f.path), DtfError);
    }
}
