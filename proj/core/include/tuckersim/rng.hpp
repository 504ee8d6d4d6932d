// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tuckersim {

// ---------------------------------------------------------------------------
// GaussianSampler
//
// Deterministic standard-normal source.  std::normal_distribution leaves its
// algorithm unspecified, so two standard libraries given the same engine can
// disagree; this sampler pins the whole pipeline instead:
//
//   * engine: std::mt19937_64 (fully specified by the standard),
//   * uniforms: top 53 bits mapped to (0, 1],
//   * normals: basic Box-Muller, pairs cached.
//
// Given one platform and seed the stream is reproducible run to run.
// ---------------------------------------------------------------------------
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in (0, 1].
    [[nodiscard]] double uniform01() {
        const std::uint64_t bits = engine_() >> 11;  // 53 random bits
        return static_cast<double>(bits + 1) * 0x1.0p-53;
    }

    /// Standard normal draw.
    [[nodiscard]] double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    [[nodiscard]] std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tuckersim
