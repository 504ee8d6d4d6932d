// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "tuckersim/fxp.hpp"
#include "tuckersim/tensor.hpp"

namespace tuckersim {

// ---------------------------------------------------------------------------
// Dense Tensor File (DTF)
//
//   offset  size  field
//   0       4     magic "DTEN"
//   4       2     format version (currently 1)
//   6       1     scalar code: 0 = float32, 1 = float64, 2 = fixed point
//   [7      2     fixed point only: total bits (u8), fraction bits (u8)]
//   .       2     order d
//   .       8*d   extents, mode 1 first
//   .       ...   element data, mode-1-major (first index fastest)
//
// All integers little-endian.  Fixed-point elements are two's-complement
// words of ceil(total_bits / 8) bytes, little-endian; readers sign-extend
// from bit total_bits-1 and ignore any higher bits in the top byte.
// ---------------------------------------------------------------------------

/// I/O and file-format failures (distinct from argument validation).
class DtfError : public std::runtime_error {
public:
    explicit DtfError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::uint16_t kDtfVersion = 1;

using DtfTensor = std::variant<DenseTensor<float>, DenseTensor<double>, DenseTensor<FxValue>>;

void write_dtf(const std::string& path, const DenseTensor<float>& x);
void write_dtf(const std::string& path, const DenseTensor<double>& x);
/// All elements must share one format.
void write_dtf(const std::string& path, const DenseTensor<FxValue>& x);

/// Parse a DTF file into whichever scalar type it holds.
[[nodiscard]] DtfTensor read_dtf(const std::string& path);

/// Parse and convert to double (fixed-point values are scaled by 2^-frac).
[[nodiscard]] DenseTensor<double> read_dtf_as_double(const std::string& path);

}  // namespace tuckersim
