#include "tuckersim/perf.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "tuckersim/ttm_plan.hpp"

namespace tuckersim {

namespace {

void check_problem(const std::vector<index_t>& dims, const std::vector<index_t>& ranks) {
    if (dims.empty() || dims.size() != ranks.size()) {
        throw std::invalid_argument("perf: dims and ranks must be non-empty and equally long");
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1 || ranks[i] < 1) {
            throw std::invalid_argument("perf: dims and ranks must be positive (mode " +
                                        std::to_string(i + 1) + ")");
        }
    }
}

void check_mode(const std::vector<index_t>& dims, index_t k, const char* what) {
    if (k < 1 || k > static_cast<index_t>(dims.size())) {
        throw std::invalid_argument(std::string(what) + ": mode " + std::to_string(k) +
                                    " out of range [1, " + std::to_string(dims.size()) + "]");
    }
}

std::int64_t checked(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max()) {
        throw std::overflow_error(std::string(what) + ": cycle count exceeds int64");
    }
    return static_cast<std::int64_t>(v);
}

// Product accumulators stay in __int128; every public result is ranged.
__int128 product_dims(const std::vector<index_t>& v, index_t lo, index_t hi,
                      index_t skip = 0) {  // 1-based inclusive bounds
    __int128 p = 1;
    for (index_t m = lo; m <= hi; ++m) {
        if (m == skip) continue;
        p *= v[static_cast<std::size_t>(m - 1)];
    }
    return p;
}

index_t dim(const std::vector<index_t>& v, index_t m) { return v[static_cast<std::size_t>(m - 1)]; }

__int128 ceil_div_wide(__int128 a, index_t b) { return (a + b - 1) / b; }

}  // namespace

std::int64_t cycles_ttm(const std::vector<index_t>& dims, const std::vector<index_t>& ranks,
                        index_t k, index_t j, const HwConfig& cfg) {
    check_problem(dims, ranks);
    check_mode(dims, k, "cycles_ttm");
    check_mode(dims, j, "cycles_ttm");
    if (j == k) {
        throw std::invalid_argument("cycles_ttm: chain for mode " + std::to_string(k) +
                                    " never contracts its own mode");
    }
    const index_t d = static_cast<index_t>(dims.size());
    __int128 cycles = 0;
    if (j > k) {
        cycles = static_cast<__int128>(dim(dims, j)) * product_dims(ranks, j + 1, d) *
                 ceil_div_wide(product_dims(dims, 1, j - 1), cfg.q) *
                 ceil_div(dim(ranks, j), cfg.r);
    } else if (j > 1) {  // 1 < j < k
        cycles = static_cast<__int128>(dim(dims, j)) * dim(dims, k) *
                 product_dims(ranks, j + 1, d, /*skip=*/k) *
                 ceil_div_wide(product_dims(dims, 1, j - 1), cfg.q) *
                 ceil_div(dim(ranks, j), cfg.r);
    } else {  // j == 1 (and k > 1)
        cycles = static_cast<__int128>(dim(dims, k)) * product_dims(ranks, 2, d, /*skip=*/k) *
                 ceil_div(dim(dims, 1), cfg.q) * ceil_div(dim(ranks, 1), cfg.r);
    }
    if (j == 1 && cfg.include_preload) {
        cycles += static_cast<__int128>(dim(dims, 1)) * ceil_div(dim(ranks, 1), cfg.r);
    }
    return checked(cycles, "cycles_ttm");
}

std::int64_t cycles_ttm_warm(const std::vector<index_t>& dims, const std::vector<index_t>& ranks,
                             index_t k, const HwConfig& cfg) {
    check_problem(dims, ranks);
    check_mode(dims, k, "cycles_ttm_warm");
    const index_t d = static_cast<index_t>(dims.size());
    __int128 cycles = 0;
    if (k != 1) {
        cycles = static_cast<__int128>(dim(dims, k)) * product_dims(ranks, k + 1, d) *
                 ceil_div_wide(product_dims(ranks, 1, k - 1), cfg.q) *
                 ceil_div(dim(dims, k), cfg.r);
    } else {
        cycles = product_dims(ranks, 2, d) * ceil_div(dim(dims, 1), cfg.q) *
                 ceil_div(dim(dims, 1), cfg.r);
    }
    if (k == 1 && cfg.include_preload) {
        cycles += static_cast<__int128>(dim(dims, 1)) * ceil_div(dim(dims, 1), cfg.r);
    }
    return checked(cycles, "cycles_ttm_warm");
}

std::int64_t cycles_svd(const std::vector<index_t>& dims, const std::vector<index_t>& ranks,
                        index_t k, const HwConfig& cfg) {
    check_problem(dims, ranks);
    check_mode(dims, k, "cycles_svd");
    const index_t d = static_cast<index_t>(dims.size());
    const index_t ik = dim(dims, k);
    const __int128 r_rest = product_dims(ranks, 1, d, /*skip=*/k);
    const __int128 per_sweep =
        static_cast<__int128>(ik) * (ik - 1) * ceil_div_wide(ik + r_rest, cfg.p);
    return checked(per_sweep * cfg.jacobi_sweeps_per_svd, "cycles_svd");
}

PermuteCycles cycles_permute(const std::vector<index_t>& dims, const std::vector<index_t>& ranks,
                             index_t k, const HwConfig& cfg) {
    check_problem(dims, ranks);
    check_mode(dims, k, "cycles_permute");
    const index_t d = static_cast<index_t>(dims.size());
    const index_t ik = dim(dims, k);
    const __int128 r_rest = product_dims(ranks, 1, d, /*skip=*/k);
    const __int128 c = cfg.permute_constant;
    PermuteCycles out;
    out.in = checked(c * (static_cast<__int128>(ik) * ceil_div_wide(r_rest, cfg.qprime()) +
                          r_rest * ceil_div(ik, cfg.pprime())),
                     "cycles_permute");
    out.out = checked(c * static_cast<__int128>(ik) *
                          (ceil_div(ik, cfg.qprime()) + ceil_div(ik, cfg.pprime())),
                      "cycles_permute");
    return out;
}

DspEstimate estimate_dsp(const HwConfig& cfg) {
    cfg.validate();
    DspEstimate d;
    d.ttm_dsp = cfg.q * cfg.r;
    d.svd_dsp = 8 * cfg.p;
    return d;
}

double compression_ratio(const std::vector<index_t>& dims, const std::vector<index_t>& ranks) {
    check_problem(dims, ranks);
    const index_t d = static_cast<index_t>(dims.size());
    const __int128 full = product_dims(dims, 1, d);
    __int128 compressed = product_dims(ranks, 1, d);
    for (index_t k = 1; k <= d; ++k) {
        compressed += static_cast<__int128>(dim(dims, k)) * dim(ranks, k);
    }
    return static_cast<double>(full) / static_cast<double>(compressed);
}

std::int64_t ModeCycles::ttm_total() const {
    std::int64_t n = ttm_warm;
    for (std::int64_t c : ttm) n += c;
    return n;
}

std::int64_t ModeCycles::total() const { return ttm_total() + svd + permute_in + permute_out; }

std::int64_t IterationCycles::total() const {
    std::int64_t n = 0;
    for (const auto& m : modes) n += m.total();
    return n;
}

CycleReport total_cycles(const std::vector<index_t>& dims, const std::vector<index_t>& ranks,
                         const HwConfig& cfg, int iters, bool warm_start,
                         std::int64_t overhead_cycles) {
    check_problem(dims, ranks);
    cfg.validate();
    if (iters < 1) throw std::invalid_argument("total_cycles: iters must be >= 1");
    if (overhead_cycles < 0) {
        throw std::invalid_argument("total_cycles: overhead_cycles cannot be negative");
    }
    const index_t d = static_cast<index_t>(dims.size());

    // One iteration is the same as every other in the analytic model; build
    // it once from the execution schedule so the reuse structure matches what
    // actually runs, then replicate.
    const TtmPlan plan = plan_hooi_iteration(d, warm_start);
    IterationCycles iteration;
    iteration.modes.reserve(static_cast<std::size_t>(d));
    for (index_t k = 1; k <= d; ++k) {
        const ChainPlan& chain = plan.chains[static_cast<std::size_t>(k - 1)];
        ModeCycles mc;
        mc.mode = k;
        for (const TtmStep& step : chain.steps) {
            if (!step.fresh) continue;
            mc.ttm.push_back(cycles_ttm(dims, ranks, k, step.mode, cfg));
        }
        if (warm_start) mc.ttm_warm = cycles_ttm_warm(dims, ranks, k, cfg);
        mc.svd = cycles_svd(dims, ranks, k, cfg);
        const PermuteCycles pc = cycles_permute(dims, ranks, k, cfg);
        mc.permute_in = pc.in;
        mc.permute_out = pc.out;
        iteration.modes.push_back(std::move(mc));
    }

    CycleReport report;
    report.iterations.assign(static_cast<std::size_t>(iters), iteration);
    __int128 ttm = 0, warm = 0, svd = 0, permute = 0;
    for (const auto& m : iteration.modes) {
        for (std::int64_t c : m.ttm) ttm += c;
        warm += m.ttm_warm;
        svd += m.svd;
        permute += static_cast<__int128>(m.permute_in) + m.permute_out;
    }
    ttm *= iters;
    warm *= iters;
    svd *= iters;
    permute *= iters;
    report.ttm_cycles = checked(ttm, "total_cycles");
    report.warm_cycles = checked(warm, "total_cycles");
    report.svd_cycles = checked(svd, "total_cycles");
    report.permute_cycles = checked(permute, "total_cycles");
    report.total = checked(ttm + warm + svd + permute + overhead_cycles, "total_cycles");
    report.clock_hz = cfg.clock_hz;
    report.wall_time_seconds = static_cast<double>(report.total) / cfg.clock_hz;
    report.dsp = estimate_dsp(cfg);
    return report;
}

}  // namespace tuckersim
