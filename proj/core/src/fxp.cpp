// SPDX-License-Identifier: MIT
#include "tuckersim/fxp.hpp"

#include <bit>
#include <cstdio>

namespace tuckersim {

const char* fx_stage_name(FxStage s) {
    switch (s) {
        case FxStage::kQuantize:    return "quantize";
        case FxStage::kConvert:     return "convert";
        case FxStage::kTtmProduct:  return "ttm_product";
        case FxStage::kTtmAccum:    return "ttm_accum";
        case FxStage::kTtmOutput:   return "ttm_output";
        case FxStage::kSvdMoment:   return "svd_moment";
        case FxStage::kSvdRotation: return "svd_rotation";
        case FxStage::kCordic:      return "cordic";
        case FxStage::kOther:       return "other";
        case FxStage::kCount:       break;
    }
    return "unknown";
}

FxValue tree_reduce(std::span<const FxValue> values, FxFormat out, FxStats* stats,
                    FxStage stage) {
    if (values.empty()) return FxValue{0, out};

    const std::size_t padded = std::bit_ceil(values.size());
    std::vector<FxValue> work(padded, FxValue{0, out});
    for (std::size_t i = 0; i < values.size(); ++i) work[i] = values[i];

    // a_i <- a_{2i} + a_{2i+1}, halving the active length each stage.
    for (std::size_t active = padded; active > 1; active /= 2)
        for (std::size_t i = 0; i < active / 2; ++i)
            work[i] = fx_add(work[2 * i], work[2 * i + 1], out, stats, stage);
    return work[0];
}

std::string FxProfile::to_string() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "t%d.%d,m%d.%d,p%d.%d,s%d.%d,a%d.%d,c%d",
                  tensor_fmt.total_bits, tensor_fmt.frac_bits, matrix_fmt.total_bits,
                  matrix_fmt.frac_bits, product_fmt.total_bits, product_fmt.frac_bits,
                  scalar_fmt.total_bits, scalar_fmt.frac_bits, angle_fmt.total_bits,
                  angle_fmt.frac_bits, cordic_iterations);
    return buf;
}

FxProfile FxProfile::parse(const std::string& text) {
    FxProfile p;
    std::size_t pos = 0;
    bool saw_any = false;
    while (pos < text.size()) {
        const std::size_t end = text.find(',', pos);
        const std::string item =
            text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? text.size() : end + 1;
        if (item.empty()) continue;

        const char tag = item[0];
        const std::string body = item.substr(1);
        if (tag == 'c') {
            p.cordic_iterations = std::stoi(body);
            if (p.cordic_iterations < 1 || p.cordic_iterations > 60)
                throw std::invalid_argument("FxProfile: cordic iterations out of range");
            saw_any = true;
            continue;
        }
        const std::size_t dot = body.find('.');
        if (dot == std::string::npos)
            throw std::invalid_argument("FxProfile: expected total.frac in '" + item + "'");
        const FxFormat fmt =
            FxFormat::of(std::stoi(body.substr(0, dot)), std::stoi(body.substr(dot + 1)));
        switch (tag) {
            case 't': p.tensor_fmt = fmt; break;
            case 'm': p.matrix_fmt = fmt; break;
            case 'p': p.product_fmt = fmt; break;
            case 's': p.scalar_fmt = fmt; break;
            case 'a': p.angle_fmt = fmt; break;
            default:
                throw std::invalid_argument("FxProfile: unknown field tag '" +
                                            std::string(1, tag) + "'");
        }
        saw_any = true;
    }
    if (!saw_any) throw std::invalid_argument("FxProfile: empty specification");
    return p;
}

}  // namespace tuckersim
