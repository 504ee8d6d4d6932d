// SPDX-License-Identifier: MIT
#include "tuckersim/dtf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tuckersim {
namespace {

constexpr char kMagic[4] = {'D', 'T', 'E', 'N'};

void append_bytes(std::string& out, std::uint64_t v, int nbytes) {
    for (int i = 0; i < nbytes; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

class ByteReader {
public:
    ByteReader(const std::string& data, std::string path)
        : data_(data), path_(std::move(path)) {}

    std::uint64_t take(int nbytes) {
        if (pos_ + static_cast<std::size_t>(nbytes) > data_.size()) {
            throw DtfError(path_ + ": truncated file");
        }
        std::uint64_t v = 0;
        for (int i = 0; i < nbytes; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += static_cast<std::size_t>(nbytes);
        return v;
    }

    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

private:
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string header(const TensorShape& shape, int scalar_code, const FxFormat* fmt) {
    std::string out;
    out.append(kMagic, 4);
    append_bytes(out, kDtfVersion, 2);
    append_bytes(out, static_cast<std::uint64_t>(scalar_code), 1);
    if (fmt != nullptr) {
        append_bytes(out, static_cast<std::uint64_t>(fmt->total_bits), 1);
        append_bytes(out, static_cast<std::uint64_t>(fmt->frac_bits), 1);
    }
    append_bytes(out, static_cast<std::uint64_t>(shape.order()), 2);
    for (index_t k = 1; k <= shape.order(); ++k) {
        append_bytes(out, static_cast<std::uint64_t>(shape.extent(k)), 8);
    }
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw DtfError(path + ": cannot open for writing");
    }
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw DtfError(path + ": write failed");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw DtfError(path + ": cannot open for reading");
    }
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) {
        throw DtfError(path + ": read failed");
    }
    return data;
}

TensorShape read_shape(ByteReader& r, const std::string& path) {
    const auto order = r.take(2);
    if (order == 0) {
        throw DtfError(path + ": tensor order is zero");
    }
    std::vector<index_t> dims;
    dims.reserve(order);
    for (std::uint64_t k = 0; k < order; ++k) {
        const auto d = r.take(8);
        if (d == 0 || d > static_cast<std::uint64_t>(std::numeric_limits<index_t>::max())) {
            throw DtfError(path + ": invalid extent");
        }
        dims.push_back(static_cast<index_t>(d));
    }
    try {
        return TensorShape(dims);
    } catch (const std::invalid_argument& e) {
        throw DtfError(path + ": " + e.what());
    }
}

}  // namespace

void write_dtf(const std::string& path, const DenseTensor<float>& x) {
    std::string out = header(x.shape(), 0, nullptr);
    out.reserve(out.size() + 4 * static_cast<std::size_t>(x.size()));
    for (index_t i = 0; i < x.size(); ++i) {
        append_bytes(out, std::bit_cast<std::uint32_t>(x.data()[i]), 4);
    }
    write_file(path, out);
}

void write_dtf(const std::string& path, const DenseTensor<double>& x) {
    std::string out = header(x.shape(), 1, nullptr);
    out.reserve(out.size() + 8 * static_cast<std::size_t>(x.size()));
    for (index_t i = 0; i < x.size(); ++i) {
        append_bytes(out, std::bit_cast<std::uint64_t>(x.data()[i]), 8);
    }
    write_file(path, out);
}

void write_dtf(const std::string& path, const DenseTensor<FxValue>& x) {
    if (x.size() == 0) {
        throw DtfError(path + ": empty fixed-point tensor");
    }
    const FxFormat fmt = x.data()[0].fmt;
    for (index_t i = 0; i < x.size(); ++i) {
        if (!(x.data()[i].fmt == fmt)) {
            throw std::invalid_argument(path + ": tensor mixes element formats");
        }
    }
    const int nbytes = (fmt.total_bits + 7) / 8;
    std::string out = header(x.shape(), 2, &fmt);
    out.reserve(out.size() + static_cast<std::size_t>(nbytes) * static_cast<std::size_t>(x.size()));
    for (index_t i = 0; i < x.size(); ++i) {
        append_bytes(out, static_cast<std::uint64_t>(x.data()[i].raw), nbytes);
    }
    write_file(path, out);
}

DtfTensor read_dtf(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);

    char magic[4];
    for (auto& c : magic) {
        c = static_cast<char>(r.take(1));
    }
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw DtfError(path + ": bad magic");
    }
    const auto version = r.take(2);
    if (version != kDtfVersion) {
        throw DtfError(path + ": unsupported version " + std::to_string(version));
    }
    const auto code = r.take(1);

    if (code == 2) {
        const int total = static_cast<int>(r.take(1));
        const int frac = static_cast<int>(r.take(1));
        FxFormat fmt{};
        try {
            fmt = FxFormat::of(total, frac);
        } catch (const std::invalid_argument& e) {
            throw DtfError(path + ": " + e.what());
        }
        const TensorShape shape = read_shape(r, path);
        const int nbytes = (total + 7) / 8;
        if (r.remaining() != static_cast<std::size_t>(nbytes) * static_cast<std::size_t>(shape.element_count())) {
            throw DtfError(path + ": element data size mismatch");
        }
        DenseTensor<FxValue> x(
            shape, std::vector<FxValue>(static_cast<std::size_t>(shape.element_count()),
                                        FxValue{0, fmt}));
        for (index_t i = 0; i < x.size(); ++i) {
            std::uint64_t word = r.take(nbytes);
            // Sign-extend from the format's sign bit; higher bits in the top
            // byte are don't-cares.
            if (total < 64) {
                const std::uint64_t sign = std::uint64_t{1} << (total - 1);
                word &= (sign << 1) - 1;
                if ((word & sign) != 0) {
                    word |= ~((sign << 1) - 1);
                }
            }
            x.data()[i] = FxValue{static_cast<std::int64_t>(word), fmt};
        }
        return x;
    }

    if (code == 0) {
        const TensorShape shape = read_shape(r, path);
        if (r.remaining() != 4 * static_cast<std::size_t>(shape.element_count())) {
            throw DtfError(path + ": element data size mismatch");
        }
        DenseTensor<float> x(shape);
        for (index_t i = 0; i < x.size(); ++i) {
            x.data()[i] = std::bit_cast<float>(static_cast<std::uint32_t>(r.take(4)));
        }
        return x;
    }
    if (code == 1) {
        const TensorShape shape = read_shape(r, path);
        if (r.remaining() != 8 * static_cast<std::size_t>(shape.element_count())) {
            throw DtfError(path + ": element data size mismatch");
        }
        DenseTensor<double> x(shape);
        for (index_t i = 0; i < x.size(); ++i) {
            x.data()[i] = std::bit_cast<double>(r.take(8));
        }
        return x;
    }
    throw DtfError(path + ": unknown scalar code " + std::to_string(code));
}

DenseTensor<double> read_dtf_as_double(const std::string& path) {
    DtfTensor t = read_dtf(path);
    if (auto* d = std::get_if<DenseTensor<double>>(&t)) {
        return std::move(*d);
    }
    if (auto* f = std::get_if<DenseTensor<float>>(&t)) {
        DenseTensor<double> out(f->shape());
        for (index_t i = 0; i < out.size(); ++i) {
            out.data()[i] = static_cast<double>(f->data()[i]);
        }
        return out;
    }
    const auto& q = std::get<DenseTensor<FxValue>>(t);
    DenseTensor<double> out(q.shape());
    for (index_t i = 0; i < out.size(); ++i) {
        out.data()[i] = value_of(q.data()[i]);
    }
    return out;
}

}  // namespace tuckersim
