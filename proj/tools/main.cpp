// SPDX-License-Identifier: MIT
//
// tuckersim command line front end.
//
// Subcommands:
//   synth      generate a synthetic low-rank-plus-noise tensor (DTF file)
//   decompose  run HOOI (real or fixed-point) on a tensor, emit model + report
//   estimate   evaluate the analytic cycle/DSP cost model without running numerics
//   compare    run the real and fixed-point paths on the same input, report both curves
//
// Exit codes: 0 success, 2 non-convergence, 3 validation error, 4 I/O error.
// Reports are JSON; everything outside the "volatile" object is a pure
// function of the configuration and seed.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tuckersim/dtf.hpp"
#include "tuckersim/hooi.hpp"
#include "tuckersim/perf.hpp"
#include "tuckersim/synth.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace tuckersim;

constexpr int kExitOk = 0;
constexpr int kExitNonConvergence = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

constexpr const char* kReportSchema = "tuckersim-report/1";

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Config files are flat key=value lines scoped to the subcommand being run
// ("seed=7" with `decompose --config f` sets decompose's --seed).  Explicit
// [subcommand] sections are also accepted.  This formatter assigns bare keys
// to the active subcommand so both spellings resolve.
class FlatConfig : public CLI::ConfigINI {
  public:
    std::string scope;  // active subcommand name, set before parsing

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigINI::from_config(input);
        if (!scope.empty()) {
            for (auto& item : items) {
                if (item.parents.empty()) item.parents = {scope};
            }
        }
        return items;
    }
};

// ---------------------------------------------------------------------------
// Option bundles
// ---------------------------------------------------------------------------

struct SynthOpts {
    std::vector<index_t> dims;
    std::vector<index_t> rank;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

struct HwOpts {
    index_t q = 16;
    index_t r = 16;
    index_t p = 64;
    index_t read_lanes = 0;
    index_t write_lanes = 0;
    double clock_hz = 185.0e6;
    int sweeps_per_svd = 1;
    bool include_preload = false;

    [[nodiscard]] HwConfig to_config() const {
        HwConfig cfg;
        cfg.q = q;
        cfg.r = r;
        cfg.p = p;
        cfg.permute_read_lanes = read_lanes;
        cfg.permute_write_lanes = write_lanes;
        cfg.clock_hz = clock_hz;
        cfg.jacobi_sweeps_per_svd = sweeps_per_svd;
        cfg.include_preload = include_preload;
        return cfg;
    }
};

struct RunOpts {
    std::string input;            // DTF path; mutually exclusive with dims
    std::vector<index_t> dims;    // synthetic spec
    std::vector<index_t> gen_rank;
    double noise = 0.0;
    std::uint64_t seed = 1;

    std::vector<index_t> rank;  // target rank (required)
    bool fixed = false;
    bool real = false;
    std::string profile;  // FxProfile string, empty = defaults
    HwOpts hw;
    int iters = 8;
    double tol = 1e-4;
    bool warm = false;
    bool cold = false;
    std::string init = "random";

    std::string out;     // model file prefix
    std::string report;  // JSON report path
    std::string csv;     // error-curve CSV path
};

void add_hw_flags(CLI::App* cmd, HwOpts& hw) {
    cmd->add_option("--q", hw.q, "TTM tile lanes across the shared input dimension");
    cmd->add_option("--r", hw.r, "TTM tile lanes across the output dimension");
    cmd->add_option("--p", hw.p, "Rotation lanes in the SVD array");
    cmd->add_option("--read-lanes", hw.read_lanes, "Permute-in lanes (default: q)");
    cmd->add_option("--write-lanes", hw.write_lanes, "Permute-out lanes (default: p)");
    cmd->add_option("--clock", hw.clock_hz, "Clock rate in Hz for wall-time estimates");
    cmd->add_option("--sweeps-per-svd", hw.sweeps_per_svd,
                    "Jacobi sweeps charged per SVD in the cost model");
    cmd->add_flag("--preload", hw.include_preload,
                  "Charge the initial weight preload of the first chain step");
}

void add_run_flags(CLI::App* cmd, RunOpts& o, bool with_out) {
    cmd->add_option("--input", o.input, "Input tensor (DTF file)");
    cmd->add_option("--dims", o.dims, "Synthesize the input with these extents instead")
        ->delimiter(',');
    cmd->add_option("--gen-rank", o.gen_rank,
                    "Generation rank of the synthetic input (default: target rank)")
        ->delimiter(',');
    cmd->add_option("--noise", o.noise, "Synthetic noise-to-signal variance ratio");
    cmd->add_option("--seed", o.seed, "Seed for synthesis and factor initialization");
    cmd->add_option("--rank", o.rank, "Target Tucker rank, one entry per mode")
        ->delimiter(',')
        ->required();
    cmd->add_flag("--fixed", o.fixed, "Run the bit-accurate fixed-point path");
    cmd->add_flag("--real", o.real, "Run the double-precision path (default)");
    cmd->add_option("--profile", o.profile,
                    "Fixed-point profile, e.g. t16.12,m27.24,p48.24,s32.20,a32.29,c24");
    add_hw_flags(cmd, o.hw);
    cmd->add_option("--iters", o.iters, "Maximum HOOI iterations");
    cmd->add_option("--tol", o.tol, "Relative fit-change convergence threshold");
    cmd->add_flag("--warm", o.warm, "Warm-start the per-mode SVDs (default)");
    cmd->add_flag("--cold", o.cold, "Run every SVD from scratch to full convergence");
    cmd->add_option("--init", o.init, "Factor initialization: random | hosvd")
        ->check(CLI::IsMember({"random", "hosvd"}));
    if (with_out) {
        cmd->add_option("--out", o.out, "Model output prefix (<out>.core.dtf, <out>.factorK.dtf)");
    }
    cmd->add_option("--report", o.report, "Write the JSON run report here");
    cmd->add_option("--csv", o.csv, "Write the per-iteration error curve(s) as CSV");
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

json to_json(const std::vector<index_t>& v) {
    json a = json::array();
    for (auto x : v) a.push_back(x);
    return a;
}

json hw_to_json(const HwConfig& cfg) {
    return json{{"q", cfg.q},
                {"r", cfg.r},
                {"p", cfg.p},
                {"read_lanes", cfg.qprime()},
                {"write_lanes", cfg.pprime()},
                {"clock_hz", cfg.clock_hz},
                {"permute_constant", cfg.permute_constant},
                {"sweeps_per_svd", cfg.jacobi_sweeps_per_svd},
                {"include_preload", cfg.include_preload}};
}

json fx_to_json(const FxStats& fx) {
    json stages = json::object();
    for (std::size_t i = 0; i < fx.stages.size(); ++i) {
        const auto& s = fx.stages[i];
        if (s.operations == 0 && s.saturations == 0) continue;
        stages[fx_stage_name(static_cast<FxStage>(i))] = {
            {"operations", s.operations},
            {"saturations", s.saturations},
            {"max_abs", s.max_abs},
        };
    }
    return json{{"total_saturations", fx.total_saturations()}, {"stages", stages}};
}

/// First iteration (1-based) at which the fit-change test passes, or null.
json converged_at(const std::vector<double>& errs, double tol) {
    for (std::size_t t = 1; t < errs.size(); ++t) {
        const double prev = errs[t - 1];
        if (std::fabs(errs[t] - prev) / std::max(prev, 1e-12) < tol) {
            return static_cast<std::int64_t>(t + 1);
        }
    }
    return nullptr;
}

json result_to_json(const HooiResult& r, double tol, bool fixed_path) {
    json sweeps = json::array();
    for (const auto& it : r.stats.sweeps) {
        json row = json::array();
        for (int s : it) row.push_back(s);
        sweeps.push_back(row);
    }
    json out{{"iterations", r.stats.iterations},
             {"converged", r.stats.converged},
             {"converged_at", converged_at(r.stats.rel_error, tol)},
             {"rel_error_percent", r.stats.rel_error},
             {"final_error_percent", r.stats.final_error()},
             {"sweeps_per_svd", sweeps},
             {"total_sweeps", r.stats.total_sweeps()},
             {"ttm_steps", r.stats.ttm_steps},
             {"warm_premultiplies", r.stats.warm_premultiplies},
             {"scale", r.model.scale}};
    if (fixed_path) out["fx"] = fx_to_json(r.stats.fx);
    return out;
}

json cycles_to_json(const CycleReport& rep, bool per_mode) {
    json out{{"ttm_cycles", rep.ttm_cycles},
             {"warm_ttm_cycles", rep.warm_cycles},
             {"svd_cycles", rep.svd_cycles},
             {"permute_cycles", rep.permute_cycles},
             {"total_cycles", rep.total},
             {"clock_hz", rep.clock_hz},
             {"wall_seconds", rep.wall_time_seconds},
             {"dsp", json{{"ttm", rep.dsp.ttm_dsp}, {"svd", rep.dsp.svd_dsp},
                          {"total", rep.dsp.total()}}}};
    if (per_mode && !rep.iterations.empty()) {
        json modes = json::array();
        for (const auto& m : rep.iterations.front().modes) {
            json ttm = json::array();
            for (auto c : m.ttm) ttm.push_back(c);
            modes.push_back(json{{"mode", m.mode},
                                 {"ttm", ttm},
                                 {"ttm_warm", m.ttm_warm},
                                 {"svd", m.svd},
                                 {"permute_in", m.permute_in},
                                 {"permute_out", m.permute_out},
                                 {"total", m.total()}});
        }
        out["per_iteration"] = json{{"modes", modes},
                                    {"total", rep.iterations.front().total()}};
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DtfError(path + ": cannot open for writing");
    f << text;
    if (!f) throw DtfError(path + ": write failed");
}

void emit_report(const std::string& path, const json& report) {
    if (path.empty()) return;
    write_text(path, report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Shared run plumbing
// ---------------------------------------------------------------------------

struct PreparedRun {
    DenseTensor<double> x;
    TuckerRank rank;
    HooiOptions opt;
    json config_echo;
};

PreparedRun prepare_run(const RunOpts& o, const std::string& command) {
    if (o.input.empty() == o.dims.empty()) {
        throw std::invalid_argument("exactly one of --input and --dims is required");
    }
    if (o.fixed && o.real) {
        throw std::invalid_argument("--fixed and --real are mutually exclusive");
    }
    if (o.warm && o.cold) {
        throw std::invalid_argument("--warm and --cold are mutually exclusive");
    }

    PreparedRun run;
    run.rank = TuckerRank{o.rank};

    json source;
    if (!o.input.empty()) {
        run.x = read_dtf_as_double(o.input);
        source = json{{"input", o.input}};
    } else {
        SynthSpec spec;
        spec.dims = o.dims;
        spec.rank = o.gen_rank.empty() ? o.rank : o.gen_rank;
        spec.noise_ratio = o.noise;
        spec.seed = o.seed;
        run.x = synth_tensor(spec);
        source = json{{"synthetic", json{{"dims", to_json(spec.dims)},
                                         {"gen_rank", to_json(spec.rank)},
                                         {"noise", spec.noise_ratio},
                                         {"seed", spec.seed}}}};
    }

    HooiOptions& opt = run.opt;
    opt.init = o.init == "hosvd" ? HooiInit::kHosvd : HooiInit::kRandomOrthonormal;
    opt.seed = o.seed;
    opt.max_iters = o.iters;
    opt.tol = o.tol;
    opt.warm_start = !o.cold;  // --warm is the default
    opt.path = o.fixed ? NumericPath::kFixed : NumericPath::kReal;
    if (!o.profile.empty()) opt.profile = FxProfile::parse(o.profile);
    opt.hw = o.hw.to_config();

    run.config_echo = json{
        {"command", command},
        {"source", source},
        {"rank", to_json(o.rank)},
        {"path", o.fixed ? "fixed" : "real"},
        {"profile", opt.profile.to_string()},
        {"hw", hw_to_json(opt.hw)},
        {"init", o.init},
        {"seed", opt.seed},
        {"max_iters", opt.max_iters},
        {"tol", opt.tol},
        {"warm_start", opt.warm_start},
    };
    return run;
}

void write_model(const std::string& prefix, const TuckerModel& model) {
    write_dtf(prefix + ".core.dtf", model.core);
    for (std::size_t k = 0; k < model.factors.size(); ++k) {
        const auto& a = model.factors[k];
        // Column-major factor storage is exactly mode-1-major for an
        // [I_k, R_k] order-2 tensor.
        DenseTensor<double> t(TensorShape({a.rows(), a.cols()}),
                              std::vector<double>(a.storage().begin(), a.storage().end()));
        write_dtf(prefix + ".factor" + std::to_string(k + 1) + ".dtf", t);
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_synth(const SynthOpts& o) {
    SynthSpec spec;
    spec.dims = o.dims;
    spec.rank = o.rank;
    spec.noise_ratio = o.noise;
    spec.seed = o.seed;
    const DenseTensor<double> x = synth_tensor(spec);
    write_dtf(o.out, x);
    std::printf("wrote %s: dims %s rank %s noise %.6g seed %llu (%lld elements)\n",
                o.out.c_str(), x.shape().to_string().c_str(),
                TensorShape(o.rank).to_string().c_str(), o.noise,
                static_cast<unsigned long long>(o.seed), static_cast<long long>(x.size()));
    return kExitOk;
}

int run_decompose(const RunOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    PreparedRun run = prepare_run(o, "decompose");

    const HooiResult r = hooi(run.x, run.rank, run.opt);
    const double recon = relative_error(run.x, r.model);

    if (!o.out.empty()) write_model(o.out, r.model);

    json report{{"schema", kReportSchema},
                {"config", run.config_echo},
                {"result", result_to_json(r, run.opt.tol, o.fixed)}};
    report["result"]["reconstruction_error_percent"] = recon;
    report["volatile"] = json{{"wall_seconds", seconds_since(t0)}};
    emit_report(o.report, report);

    if (!o.csv.empty()) {
        std::string csv = "iteration,rel_error_percent\n";
        for (std::size_t t = 0; t < r.stats.rel_error.size(); ++t) {
            csv += std::to_string(t + 1) + "," + std::to_string(r.stats.rel_error[t]) + "\n";
        }
        write_text(o.csv, csv);
    }

    std::printf("%s path: %d iteration(s), final error %.6f%%, reconstruction %.6f%%, "
                "%ld sweeps%s\n",
                o.fixed ? "fixed" : "real", r.stats.iterations, r.stats.final_error(), recon,
                r.stats.total_sweeps(), r.stats.converged ? "" : " (did not converge)");
    return r.stats.converged ? kExitOk : kExitNonConvergence;
}

int run_estimate(const std::vector<index_t>& dims, const std::vector<index_t>& rank,
                 const HwOpts& hw, int iters, bool cold, const std::string& report_path) {
    const HwConfig cfg = hw.to_config();
    const CycleReport rep = total_cycles(dims, rank, cfg, iters, !cold);
    const double ratio = compression_ratio(dims, rank);

    json report{{"schema", kReportSchema},
                {"config", json{{"command", "estimate"},
                                {"dims", to_json(dims)},
                                {"rank", to_json(rank)},
                                {"hw", hw_to_json(cfg)},
                                {"iterations", iters},
                                {"warm_start", !cold}}},
                {"estimate", cycles_to_json(rep, /*per_mode=*/true)}};
    report["estimate"]["compression_ratio"] = ratio;

    if (report_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        emit_report(report_path, report);
        std::printf("%lld cycles over %d iteration(s) -> %.6f s at %.0f Hz, %lld DSPs, "
                    "compression %.2fx\n",
                    static_cast<long long>(rep.total), iters, rep.wall_time_seconds, cfg.clock_hz,
                    static_cast<long long>(rep.dsp.total()), ratio);
    }
    return kExitOk;
}

int run_compare(const RunOpts& o, const std::string& subject_path) {
    const auto t0 = std::chrono::steady_clock::now();
    PreparedRun run = prepare_run(o, "compare");
    run.config_echo["subject_path"] = subject_path;

    // Both runs execute exactly max_iters iterations so the curves align;
    // convergence is evaluated on the curves afterwards.
    HooiOptions base = run.opt;
    base.stop_on_convergence = false;

    HooiOptions real_opt = base;
    real_opt.path = NumericPath::kReal;
    const HooiResult real_run = hooi(run.x, run.rank, real_opt);

    HooiOptions subj_opt = base;
    subj_opt.path = subject_path == "fixed" ? NumericPath::kFixed : NumericPath::kReal;
    const HooiResult subj_run = hooi(run.x, run.rank, subj_opt);

    const double gap = subj_run.stats.final_error() - real_run.stats.final_error();

    json report{{"schema", kReportSchema},
                {"config", run.config_echo},
                {"real", result_to_json(real_run, run.opt.tol, false)},
                {"subject", result_to_json(subj_run, run.opt.tol, subj_opt.path ==
                                                                      NumericPath::kFixed)},
                {"gap_percent", gap}};
    report["subject"]["path"] = subject_path;
    report["volatile"] = json{{"wall_seconds", seconds_since(t0)}};
    emit_report(o.report, report);

    if (!o.csv.empty()) {
        std::string csv = "iteration,real_percent,subject_percent\n";
        for (std::size_t t = 0; t < real_run.stats.rel_error.size(); ++t) {
            csv += std::to_string(t + 1) + "," + std::to_string(real_run.stats.rel_error[t]) +
                   "," + std::to_string(subj_run.stats.rel_error[t]) + "\n";
        }
        write_text(o.csv, csv);
    }

    std::printf("real %.6f%% vs %s %.6f%% after %d iteration(s): gap %.6f pp\n",
                real_run.stats.final_error(), subject_path.c_str(),
                subj_run.stats.final_error(), o.iters, gap);
    return real_run.stats.converged ? kExitOk : kExitNonConvergence;
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const DtfError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::overflow_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic Tucker decomposition engine with a hardware cost model"};
    app.require_subcommand(1);
    // One config option on the root; subcommands fall through so "--config"
    // may appear after the subcommand name.  Bare keys in the file apply to
    // the subcommand being run (flat key=value format).
    app.set_config("--config", "",
                   "Read option defaults from a key=value file (command line wins)");
    auto config_fmt = std::make_shared<FlatConfig>();
    app.config_formatter(config_fmt);
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config") {
            ++i;  // skip the file path
        } else if (!arg.empty() && arg.front() != '-') {
            config_fmt->scope = arg;  // first positional token is the subcommand
            break;
        }
    }

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic tensor as a DTF file");
    synth_cmd->fallthrough();
    synth_cmd->add_option("--dims", synth.dims, "Tensor extents, e.g. 64,64,64")
        ->delimiter(',')
        ->required();
    synth_cmd->add_option("--rank", synth.rank, "Generation rank per mode")
        ->delimiter(',')
        ->required();
    synth_cmd->add_option("--noise", synth.noise, "Noise-to-signal variance ratio");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed");
    synth_cmd->add_option("--out", synth.out, "Output DTF path")->required();

    RunOpts dec;
    auto* dec_cmd = app.add_subcommand("decompose", "Run HOOI on a tensor and emit the model");
    dec_cmd->fallthrough();
    add_run_flags(dec_cmd, dec, /*with_out=*/true);

    std::vector<index_t> est_dims;
    std::vector<index_t> est_rank;
    HwOpts est_hw;
    int est_iters = 8;
    bool est_cold = false;
    std::string est_report;
    auto* est_cmd =
        app.add_subcommand("estimate", "Evaluate the cycle and DSP cost model for a problem");
    est_cmd->fallthrough();
    est_cmd->add_option("--dims", est_dims, "Tensor extents")->delimiter(',')->required();
    est_cmd->add_option("--rank", est_rank, "Target rank per mode")->delimiter(',')->required();
    add_hw_flags(est_cmd, est_hw);
    est_cmd->add_option("--iters", est_iters, "HOOI iterations to charge");
    est_cmd->add_flag("--cold", est_cold, "Model cold SVDs (no warm pre-multiply TTMs)");
    est_cmd->add_option("--report", est_report, "Write the JSON report here (default: stdout)");

    RunOpts cmp;
    std::string cmp_subject = "fixed";
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Run the real path and a subject path on the same input; report both curves");
    cmp_cmd->fallthrough();
    add_run_flags(cmp_cmd, cmp, /*with_out=*/false);
    cmp_cmd->add_option("--subject", cmp_subject, "Second path to run: fixed | real")
        ->check(CLI::IsMember({"fixed", "real"}));

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) return guarded([&] { return run_synth(synth); });
    if (dec_cmd->parsed()) return guarded([&] { return run_decompose(dec); });
    if (est_cmd->parsed()) {
        return guarded(
            [&] { return run_estimate(est_dims, est_rank, est_hw, est_iters, est_cold,
                                      est_report); });
    }
    return guarded([&] { return run_compare(cmp, cmp_subject); });
}
