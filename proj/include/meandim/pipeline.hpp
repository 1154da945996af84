#pragma once

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <map>
#include <optional>
#include <string>

#include "meandim/io.hpp"
#include "meandim/kernel.hpp"
#include "meandim/mdim.hpp"
#include "meandim/params.hpp"
#include "meandim/rng.hpp"
#include "meandim/spectral.hpp"
#include "meandim/symbolic.hpp"
#include "meandim/synthesis.hpp"

namespace meandim {

struct RunConfig {
    double a = 0;
    double b = 3;
    double s = 1;
    Mode mode = Mode::Strict;
    // Explicit construction parameters; all four or none.
    std::optional<std::int64_t> p, q;
    std::optional<double> eps0, c;
    std::optional<double> eps_sharp;
    std::int64_t search_bound = 64;

    int kmax = 2;
    /// Sampled certificates run for k <= min(kmax, cert_max_level).
    int cert_max_level = 2;
    std::uint64_t seed = 1;
    std::int64_t window_radius = kDefaultWindowRadius;
    double tol_band = 0.99;
    double tol_roundtrip = 1e-3;
    ExpSign exp_sign = ExpSign::Positive;

    std::int64_t cert_trials = 1000;
    std::int64_t ball_points = 10000;
    std::int64_t equivariance_points = 1000;
    std::int64_t sampling_trials = 100;
    double spectral_periods = 64;
    double symbol_tol = 1e-9;

    std::string out_dir;
};

inline std::string_view to_string(ExpSign s) { return s == ExpSign::Positive ? "+" : "-"; }

inline ExpSign parse_exp_sign(std::string_view s) {
    if (s == "+" || s == "positive" || s == "+c") return ExpSign::Positive;
    if (s == "-" || s == "negative" || s == "-c") return ExpSign::Negative;
    throw Error("cli", ErrorCode::ParseError, "exp sign must be + or -");
}

inline json to_json(const RunConfig& cfg) {
    json j{{"a", cfg.a}, {"b", cfg.b}, {"s", cfg.s}, {"mode", std::string(to_string(cfg.mode))},
           {"search_bound", cfg.search_bound}, {"kmax", cfg.kmax}, {"cert_max_level", cfg.cert_max_level},
           {"seed", cfg.seed}, {"window_radius", cfg.window_radius}, {"tol_band", cfg.tol_band},
           {"tol_roundtrip", cfg.tol_roundtrip}, {"exp_sign", std::string(to_string(cfg.exp_sign))},
           {"cert_trials", cfg.cert_trials}, {"ball_points", cfg.ball_points},
           {"equivariance_points", cfg.equivariance_points}, {"sampling_trials", cfg.sampling_trials},
           {"spectral_periods", cfg.spectral_periods}, {"symbol_tol", cfg.symbol_tol}};
    if (cfg.p) j["p"] = *cfg.p;
    if (cfg.q) j["q"] = *cfg.q;
    if (cfg.eps0) j["eps0"] = *cfg.eps0;
    if (cfg.c) j["c"] = *cfg.c;
    if (cfg.eps_sharp) j["eps_sharp"] = *cfg.eps_sharp;
    return j;
}

/// Overlays `key=value` pairs onto `cfg`. Unknown keys are an error.
inline RunConfig apply_config(RunConfig cfg, const std::map<std::string, std::string>& kv) {
    auto to_int = [](const std::string& key, const std::string& v) {
        std::int64_t out = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw Error("cli", ErrorCode::ParseError, "config key '" + key + "': bad integer '" + v + "'");
        return out;
    };
    auto to_u64 = [](const std::string& key, const std::string& v) {
        std::uint64_t out = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw Error("cli", ErrorCode::ParseError, "config key '" + key + "': bad seed '" + v + "'");
        return out;
    };
    for (const auto& [key, v] : kv) {
        if (key == "a") cfg.a = parse_decimal(v);
        else if (key == "b") cfg.b = parse_decimal(v);
        else if (key == "s") cfg.s = parse_decimal(v);
        else if (key == "mode") cfg.mode = parse_mode(v);
        else if (key == "p") cfg.p = to_int(key, v);
        else if (key == "q") cfg.q = to_int(key, v);
        else if (key == "eps0") cfg.eps0 = parse_decimal(v);
        else if (key == "c") cfg.c = parse_decimal(v);
        else if (key == "eps_sharp") cfg.eps_sharp = parse_decimal(v);
        else if (key == "search_bound") cfg.search_bound = to_int(key, v);
        else if (key == "kmax") cfg.kmax = static_cast<int>(to_int(key, v));
        else if (key == "cert_max_level") cfg.cert_max_level = static_cast<int>(to_int(key, v));
        else if (key == "seed") cfg.seed = to_u64(key, v);
        else if (key == "window_radius") cfg.window_radius = to_int(key, v);
        else if (key == "tol_band") cfg.tol_band = parse_decimal(v);
        else if (key == "tol_roundtrip") cfg.tol_roundtrip = parse_decimal(v);
        else if (key == "exp_sign") cfg.exp_sign = parse_exp_sign(v);
        else if (key == "cert_trials") cfg.cert_trials = to_int(key, v);
        else if (key == "ball_points") cfg.ball_points = to_int(key, v);
        else if (key == "equivariance_points") cfg.equivariance_points = to_int(key, v);
        else if (key == "sampling_trials") cfg.sampling_trials = to_int(key, v);
        else if (key == "spectral_periods") cfg.spectral_periods = parse_decimal(v);
        else if (key == "symbol_tol") cfg.symbol_tol = parse_decimal(v);
        else if (key == "out") cfg.out_dir = v;
        else throw Error("cli", ErrorCode::ParseError, "unknown config key '" + key + "'");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cli", ErrorCode::ParseError, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return apply_config(std::move(base), parse_key_values(text.str()));
}

/// Checks the RunConfig invariants that are not parameter invariants.
inline void check_config(const RunConfig& cfg) {
    auto bad = [](const std::string& what) { throw Error("cli", ErrorCode::InvalidArgument, what); };
    if (cfg.kmax < 1) bad("kmax must be >= 1");
    if (cfg.cert_max_level < 0) bad("cert_max_level must be >= 0");
    if (cfg.window_radius < 1) bad("window_radius must be >= 1");
    if (!(cfg.tol_band > 0 && cfg.tol_band <= 1)) bad("tol_band must lie in (0, 1]");
    if (!(cfg.tol_roundtrip > 0)) bad("tol_roundtrip must be positive");
    if (!(cfg.symbol_tol > 0)) bad("symbol_tol must be positive");
    if (!(cfg.spectral_periods > 0)) bad("spectral_periods must be positive");
    if (cfg.cert_trials < 0 || cfg.ball_points < 0 || cfg.equivariance_points < 0 || cfg.sampling_trials < 0)
        bad("trial counts must be non-negative");
}

/// Explicit parameters when p, q, eps0, c are all given; otherwise the search.
inline ConstructionParams resolve_params(const RunConfig& cfg) {
    const int given = int(cfg.p.has_value()) + int(cfg.q.has_value()) + int(cfg.eps0.has_value()) + int(cfg.c.has_value());
    const double sharp = cfg.eps_sharp.value_or(kDefaultRelaxedSharpness);
    if (given == 4) return make_params(cfg.a, cfg.b, cfg.s, *cfg.p, *cfg.q, *cfg.eps0, *cfg.c, cfg.mode, sharp);
    if (given != 0) throw Error("params", ErrorCode::InvalidArgument, "give all of p, q, eps0, c or none of them");
    return derive_params(cfg.a, cfg.b, cfg.s, cfg.mode, cfg.search_bound, sharp);
}

/// Files produced by a run, keyed by path relative to the output directory.
using Artifacts = std::map<std::string, std::string>;

inline json stage_failure(const std::string& code, const std::string& message) {
    return json{{"pass", false}, {"error", code}, {"message", message}};
}

inline json run_isolated(const std::function<json()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        return stage_failure(e.qualified(), e.what());
    } catch (const std::exception& e) {
        return stage_failure("internal", e.what());
    }
}

inline json stage_plan(const ConstructionParams& prm, Artifacts* out = nullptr) {
    const auto rep = validate_params(prm);
    if (out) (*out)["params.txt"] = serialize_params(prm);
    json notes = json::array();
    if (prm.r == Rational(0))
        notes.push_back("r = 0: degenerate target; every level-1 word still carries one star and the bounds collapse toward 0");
    return json{{"pass", rep.ok()}, {"params", to_json(prm)}, {"validation", to_json(rep)}, {"notes", notes}};
}

inline constexpr std::int64_t kMaxDumpedPattern = 1 << 16;

inline json stage_construct(const Tower& tower, Artifacts* out = nullptr) {
    json levels = json::array();
    bool ok = true;
    const auto& r = tower.params().r;
    for (int k = 1; k <= tower.depth(); ++k) {
        const auto& w = tower.level(k);
        const bool holds = proportion_holds(w.star_count(), w.length, r);
        ok = ok && holds;
        levels.push_back({{"k", k}, {"N_k", w.length}, {"n_k", w.multiplier}, {"stars", w.star_count()},
                          {"tail_blocks", w.tail_count}, {"proportion", to_json(w.proportion())},
                          {"proportion_holds", holds}});
        if (out && w.length <= kMaxDumpedPattern)
            (*out)["patterns/level_" + std::to_string(k) + ".json"] = to_json(w).dump(1);
    }
    return json{{"pass", ok}, {"levels", levels}};
}

/// Random point of Y_k covering symbols [-radius - margin, radius + margin].
inline SkewPoint synthesis_point(const Tower& tower, int k, std::int64_t radius, std::uint64_t seed, std::int64_t i) {
    const std::int64_t margin = 4;
    const std::int64_t first = -radius - margin;
    const std::int64_t length = std::max(2 * (radius + margin) + 1, tower.level(k).length);
    return SkewPoint{generate_segment(tower, k, length, seed, FillMode::Random, first), i};
}

inline json stage_synth(const Tower& tower, const RunConfig& cfg, Artifacts* out = nullptr) {
    const auto& prm = tower.params();
    const int k = tower.depth();
    const std::int64_t R = cfg.window_radius;
    const auto kernel = make_kernel(prm);
    const double lattice_C = normalization_C(kernel);
    const double norm = kSymbolModulusBound * lattice_C;
    Stream rng(derive_seed(cfg.seed, "synth"));
    const std::uint64_t point_seed = rng.below(UINT64_MAX);
    const auto i0 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(prm.p)));
    const SkewPoint pt = synthesis_point(tower, k, R, point_seed, i0);
    const BandSignal g = synth_F(pt, kernel, norm, R);
    const BandSignal gg = apply_G(g, i0, prm.c, cfg.exp_sign);

    // Unit ball.
    const double reach = kernel.spacing() * static_cast<double>(R * prm.q);
    double max_f = 0, max_g = 0;
    for (std::int64_t t = 0; t < cfg.ball_points; ++t) {
        const double x = rng.uniform(-reach, reach);
        max_f = std::max(max_f, std::abs(g.eval(x)));
        max_g = std::max(max_g, std::abs(gg.eval(x)));
    }
    const bool ball_ok = max_f <= 1 + 1e-9 && max_g <= 1 + 1e-9;

    // Coefficient recovery on the whole window.
    double rt_err = 0, rt_bound_slack = std::numeric_limits<double>::infinity();
    std::int64_t rt_over_bound = 0;
    for (const auto& rc : recover_coeffs(g, i0, -R, R)) {
        const auto sym = pt.segment.at(rc.n);
        const Complex truth(sym[static_cast<std::size_t>(2 * rc.j)], sym[static_cast<std::size_t>(2 * rc.j + 1)]);
        const double err = std::abs(rc.value - truth);
        rt_err = std::max(rt_err, err);
        rt_bound_slack = std::min(rt_bound_slack, rc.error_bound - err);
        if (err > rc.error_bound + 1e-12) ++rt_over_bound;
    }
    const bool rt_ok = rt_err < cfg.tol_roundtrip && rt_over_bound == 0;

    // F S = T F and G T = sigma G on random points and arguments.
    std::int64_t fs_viol = 0, gt_viol = 0;
    double fs_worst = 0, gt_worst = 0;
    const double half = reach / 2;
    for (std::int64_t t = 0; t < cfg.equivariance_points; ++t) {
        const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(prm.p)));
        const SkewPoint base{pt.segment, i};
        const BandSignal f0 = synth_F(base, kernel, norm, R);
        const BandSignal lhs = synth_F(skew_S(base, prm.p, R), kernel, norm, R);
        const BandSignal rhs = skew_T(f0);
        const double x = rng.uniform(-half, half);
        const double d1 = std::abs(lhs.eval(x) - rhs.eval(x));
        const double b1 = lhs.truncation_bound(x) + rhs.truncation_bound(x) + 1e-12;
        fs_worst = std::max(fs_worst, d1 / b1);
        if (d1 > b1) ++fs_viol;

        const BandSignal gl = apply_G(rhs, rhs.counter, prm.c, cfg.exp_sign);
        const BandSignal gr = time_shift(apply_G(f0, i, prm.c, cfg.exp_sign), 1.0);
        const double d2 = std::abs(gl.eval(x) - gr.eval(x));
        const double b2 = gl.truncation_bound(x) + gr.truncation_bound(x) + 1e-12;
        gt_worst = std::max(gt_worst, d2 / b2);
        if (d2 > b2) ++gt_viol;
    }

    if (out) {
        (*out)["signals/kernel.json"] = to_json(kernel).dump(1);
        (*out)["signals/kernel_grid.csv"] = kernel_grid_csv(kernel, -20, 20, 0.01);
        (*out)["signals/F_coefficients.json"] = coeffs_to_json(g).dump();
        (*out)["signals/F.csv"] = signal_dump_csv(g, -20, 20, 0.01);
        (*out)["signals/G.csv"] = signal_dump_csv(gg, -20, 20, 0.01);
    }

    const double cp = prm.c * static_cast<double>(prm.p);
    const bool cp_integral = std::fabs(cp - std::round(cp)) < 1e-9;
    return json{{"pass", ball_ok && rt_ok && fs_viol == 0 && gt_viol == 0},
                {"level", k},
                {"window_radius", R},
                {"kernel", to_json(kernel)},
                {"lattice_C", lattice_C},
                {"norm", norm},
                {"unit_ball", {{"points", cfg.ball_points}, {"max_abs_F", max_f}, {"max_abs_G", max_g}, {"pass", ball_ok}}},
                {"round_trip", {{"max_error", rt_err}, {"min_bound_slack", rt_bound_slack},
                                {"over_bound", rt_over_bound}, {"pass", rt_ok}}},
                {"equivariance", {{"points", cfg.equivariance_points}, {"FS_vs_TF_violations", fs_viol},
                                  {"FS_vs_TF_worst_ratio", fs_worst}, {"GT_vs_sigmaG_violations", gt_viol},
                                  {"GT_vs_sigmaG_worst_ratio", gt_worst}, {"cp_integral", cp_integral}}}};
}

inline json spectrum_json(const SpectrumEstimate& est) {
    return json{{"window", std::string(to_string(est.window_kind))}, {"radius", est.window_radius},
                {"sample_step", est.sample_step}, {"bins", est.freqs.size()}, {"bin_width", est.bin_width()},
                {"parseval_error", parseval_error(est)}};
}

inline json stage_spectrum(const Tower& tower, const RunConfig& cfg, Artifacts* out = nullptr) {
    const auto& prm = tower.params();
    const int k = tower.depth();
    const std::int64_t R = cfg.window_radius;
    const auto kernel = make_kernel(prm);
    const double norm = synthesis_norm(kernel);
    Stream rng(derive_seed(cfg.seed, "spectrum"));
    const std::uint64_t point_seed = rng.below(UINT64_MAX);
    const auto i0 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(prm.p)));
    const BandSignal g = synth_F(synthesis_point(tower, k, R, point_seed, i0), kernel, norm, R);
    const BandSignal gg = apply_G(g, i0, prm.c, cfg.exp_sign);
    const auto rr = realify(gg);

    // period 1/|c|, clamped to the coefficient window
    const double reach = kernel.spacing() * static_cast<double>(R * prm.q);
    const double radius = std::min(cfg.spectral_periods / std::fabs(prm.c), reach);
    const double line = gg.extra->line_frequency();
    const double fmax = std::max({gg.max_frequency(), std::fabs(line), 1e-3});
    const double step = 0.4 / fmax;

    const auto ef = spectrum_estimate(g, radius, step);
    const auto eg = spectrum_estimate(gg, radius, step);
    const auto er = spectrum_estimate(rr, radius, step);
    const double bin = ef.bin_width();

    const double f_ratio = band_energy_ratio(ef, prm.a + prm.eps0, prm.b, bin);
    const double g_lo = std::min(prm.a, line), g_hi = std::max(prm.b, line);
    const double g_ratio = band_energy_ratio(eg, g_lo, g_hi, bin);
    const double peak = peak_frequency(eg, -fmax - 1, fmax + 1);
    const double lp = line_power(eg, line);
    const bool line_ok = std::fabs(peak - line) <= 2 * bin && std::fabs(lp - 0.25) <= 0.05;
    const double r_half = std::max(std::fabs(g_lo), std::fabs(g_hi));
    const double r_ratio = band_energy_ratio(er, -r_half, r_half, bin);
    const double sym = symmetry_error(er);
    const double parseval = std::max({parseval_error(ef), parseval_error(eg), parseval_error(er)});

    if (out) {
        (*out)["spectra/F.csv"] = spectrum_csv(ef);
        (*out)["spectra/G.csv"] = spectrum_csv(eg);
        (*out)["spectra/realified.csv"] = spectrum_csv(er);
    }
    const bool ok = f_ratio >= cfg.tol_band && g_ratio >= cfg.tol_band && line_ok && r_ratio >= cfg.tol_band &&
                    sym <= 1e-9 && parseval <= 1e-9;
    return json{{"pass", ok},
                {"estimate", spectrum_json(ef)},
                {"F", {{"band", {prm.a + prm.eps0, prm.b}}, {"ratio", f_ratio}}},
                {"G", {{"band", {g_lo, g_hi}}, {"ratio", g_ratio}, {"line", line}, {"peak", peak},
                       {"line_power", lp}, {"line_in_stated_band", line >= prm.a && line <= prm.b}}},
                {"realified", {{"band", {-r_half, r_half}}, {"ratio", r_ratio}, {"symmetry_error", sym}}},
                {"max_parseval_error", parseval}};
}

inline json stage_sampling(const Tower& tower, const RunConfig& cfg) {
    const auto& prm = tower.params();
    const auto kernel = make_kernel(prm);
    const double norm = synthesis_norm(kernel);
    Stream rng(derive_seed(cfg.seed, "sampling"));
    const std::uint64_t point_seed = rng.below(UINT64_MAX);
    const std::int64_t R = cfg.window_radius;
    const BandSignal g = synth_F(synthesis_point(tower, tower.depth(), R, point_seed, 0), kernel, norm, R);
    const auto rr = realify(apply_G(g, 0, prm.c, cfg.exp_sign));
    const auto seq = integer_sampling(rr, -50, 50);
    bool in_range = true;
    for (double v : seq.rescaled) in_range = in_range && v >= 0 && v <= 1;

    const auto ev = sampling_injectivity_check(0.4, 1.0, cfg.sampling_trials, derive_seed(cfg.seed, "sampling.pairs"));
    bool refused = false;
    std::string refusal;
    try {
        sampling_injectivity_check(0.6, 1.0, 1, 0);
    } catch (const Error& e) {
        refused = e.code() == ErrorCode::HypothesisViolation;
        refusal = e.qualified();
    }
    return json{{"pass", in_range && ev.pass() && ev.separated == ev.trials && refused},
                {"samples", {{"first", seq.first}, {"count", seq.raw.size()}, {"in_unit_interval", in_range}}},
                {"injectivity", to_json(ev)},
                {"refusal", {{"half_band", 0.6}, {"step", 1.0}, {"refused", refused}, {"error", refusal}}}};
}

inline json stage_certify(const Tower& tower, const RunConfig& cfg, Artifacts* out = nullptr) {
    const int top = tower.depth();
    const int sampled = std::min(top, cfg.cert_max_level);
    json levels = json::array();
    bool ok = true;
    std::optional<Rational> prev_gap;
    bool gap_ok = true;
    for (int k = 1; k <= top; ++k) {
        const auto rep = mdim_report(tower, k);
        json lvl{{"report", to_json(rep)}};
        ok = ok && rep.pass();
        if (prev_gap) {
            const bool shrinks = rep.gap < *prev_gap || (rep.gap == Rational(0) && *prev_gap == Rational(0));
            gap_ok = gap_ok && shrinks;
        }
        prev_gap = rep.gap;
        if (k <= sampled) {
            const std::string tag = "certify.k" + std::to_string(k);
            const auto lower = lower_certificate(tower, k, cfg.cert_trials, derive_seed(cfg.seed, tag + ".lower"));
            lvl["lower"] = to_json(lower);
            ok = ok && lower.pass();
            json uppers = json::array();
            const std::int64_t n = tower.level(k).length;
            for (double eps : {0.5, 0.1}) {
                for (std::int64_t m : {n, 2 * n}) {
                    const auto up = upper_certificate(tower, k, m, eps, cfg.cert_trials,
                                                      derive_seed(cfg.seed, tag + ".upper." + format_decimal(eps) + "." +
                                                                                std::to_string(m)));
                    uppers.push_back(to_json(up));
                    ok = ok && up.pass();
                }
            }
            lvl["upper"] = uppers;
            const auto seg = generate_segment(tower, k, 10 * n, derive_seed(cfg.seed, tag + ".minimality"), FillMode::Random);
            const auto mini = minimality_evidence(tower, k, seg, cfg.symbol_tol);
            lvl["minimality"] = to_json(mini);
            ok = ok && mini.pass();
        }
        if (out) (*out)["certificates/level_" + std::to_string(k) + ".json"] = lvl.dump(1);
        levels.push_back(lvl);
    }
    return json{{"pass", ok && gap_ok}, {"gap_shrinks", gap_ok}, {"sampled_levels", sampled}, {"levels", levels}};
}

struct PipelineResult {
    json summary;
    Artifacts files;
    bool pass() const { return summary.value("pass", false); }
};

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline const std::vector<std::string>& all_stages() {
    static const std::vector<std::string> names{"plan", "construct", "synth", "spectrum", "sampling", "certify"};
    return names;
}

/// Runs the named stages in order. A failing plan stops the run; any other
/// failure is recorded and the remaining stages still run.
inline PipelineResult run_stages(const RunConfig& cfg, const std::vector<std::string>& stages) {
    PipelineResult res;
    json& sum = res.summary;
    sum["config"] = to_json(cfg);
    json results = json::object();
    bool ok = true;

    std::optional<ConstructionParams> prm;
    try {
        check_config(cfg);
        prm = resolve_params(cfg);
    } catch (const Error& e) {
        results["plan"] = stage_failure(e.qualified(), e.what());
        ok = false;
    }
    if (prm) {
        const json plan = stage_plan(*prm, &res.files);
        results["plan"] = plan;
        ok = plan["pass"].get<bool>();
        if (!ok) prm.reset();
    }

    std::optional<Tower> tower;
    if (prm) {
        try {
            tower.emplace(*prm, cfg.kmax);
        } catch (const Error& e) {
            results["construct"] = stage_failure(e.qualified(), e.what());
            ok = false;
        }
    }
    auto want = [&](const std::string& name) { return std::find(stages.begin(), stages.end(), name) != stages.end(); };
    if (tower) {
        if (want("construct")) results["construct"] = run_isolated([&] { return stage_construct(*tower, &res.files); });
        if (want("synth")) results["synth"] = run_isolated([&] { return stage_synth(*tower, cfg, &res.files); });
        if (want("spectrum")) results["spectrum"] = run_isolated([&] { return stage_spectrum(*tower, cfg, &res.files); });
        if (want("sampling")) results["sampling"] = run_isolated([&] { return stage_sampling(*tower, cfg); });
        if (want("certify")) results["certify"] = run_isolated([&] { return stage_certify(*tower, cfg, &res.files); });
    }
    for (const auto& [name, r] : results.items()) ok = ok && r.value("pass", false);
    sum["stages"] = results;
    sum["pass"] = ok;
    sum["timestamp"] = utc_timestamp();
    res.files["summary.json"] = sum.dump(2);
    return res;
}

inline PipelineResult run_pipeline(const RunConfig& cfg) { return run_stages(cfg, all_stages()); }

/// Summary without the wall-clock field; identical for identical inputs.
inline json canonical_summary(json summary) {
    summary.erase("timestamp");
    return summary;
}

inline void write_artifacts(const Artifacts& files, const std::filesystem::path& dir) {
    for (const auto& [rel, content] : files) {
        const auto path = dir / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os) throw Error("cli", ErrorCode::InvalidArgument, "cannot write " + path.string());
        os << content;
    }
}

} // namespace meandim
