#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "meandim/meandim.hpp"

namespace {

struct Flags {
    std::optional<double> a, b, s, eps0, c, eps_sharp, tol_band, tol_roundtrip;
    std::optional<std::int64_t> p, q, search_bound, window_radius, cert_trials;
    std::optional<int> kmax;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode, out, exp_sign, config;
};

meandim::RunConfig build_config(const Flags& f) {
    meandim::RunConfig cfg;
    if (f.config) cfg = meandim::load_config(*f.config, cfg);
    if (f.a) cfg.a = *f.a;
    if (f.b) cfg.b = *f.b;
    if (f.s) cfg.s = *f.s;
    if (f.mode) cfg.mode = meandim::parse_mode(*f.mode);
    if (f.p) cfg.p = *f.p;
    if (f.q) cfg.q = *f.q;
    if (f.eps0) cfg.eps0 = *f.eps0;
    if (f.c) cfg.c = *f.c;
    if (f.eps_sharp) cfg.eps_sharp = *f.eps_sharp;
    if (f.search_bound) cfg.search_bound = *f.search_bound;
    if (f.kmax) cfg.kmax = *f.kmax;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_dir = *f.out;
    if (f.tol_band) cfg.tol_band = *f.tol_band;
    if (f.tol_roundtrip) cfg.tol_roundtrip = *f.tol_roundtrip;
    if (f.window_radius) cfg.window_radius = *f.window_radius;
    if (f.cert_trials) cfg.cert_trials = *f.cert_trials;
    if (f.exp_sign) cfg.exp_sign = meandim::parse_exp_sign(*f.exp_sign);
    return cfg;
}

void print_plan(const meandim::json& plan) {
    if (plan.contains("params")) {
        const auto& prm = plan["params"];
        std::printf("a=%s b=%s s=%s p=%lld q=%lld eps0=%s c=%s r=%s mode=%s\n",
                    prm["a"].dump().c_str(), prm["b"].dump().c_str(), prm["s"].dump().c_str(),
                    static_cast<long long>(prm["p"].get<std::int64_t>()), static_cast<long long>(prm["q"].get<std::int64_t>()),
                    prm["eps0"].dump().c_str(), prm["c"].dump().c_str(),
                    prm["r"]["exact"].get<std::string>().c_str(), prm["mode"].get<std::string>().c_str());
    }
    if (plan.contains("validation")) {
        for (const auto& c : plan["validation"]["checks"])
            std::printf("  %-4s %-24s residual %s\n", c["pass"].get<bool>() ? "ok" : "FAIL",
                        c["name"].get<std::string>().c_str(), c["residual"].dump().c_str());
    }
    if (plan.contains("notes"))
        for (const auto& n : plan["notes"]) std::printf("note: %s\n", n.get<std::string>().c_str());
}

void print_construct(const meandim::json& st) {
    std::printf("%3s %10s %8s %10s %12s %s\n", "k", "N_k", "n_k", "stars", "|*|/N_k", "proportion");
    for (const auto& l : st["levels"])
        std::printf("%3d %10lld %8lld %10lld %12s %s\n", l["k"].get<int>(),
                    static_cast<long long>(l["N_k"].get<std::int64_t>()),
                    static_cast<long long>(l["n_k"].get<std::int64_t>()),
                    static_cast<long long>(l["stars"].get<std::int64_t>()),
                    l["proportion"]["exact"].get<std::string>().c_str(), l["proportion_holds"].get<bool>() ? "ok" : "FAIL");
}

void print_certify(const meandim::json& st) {
    std::printf("%3s %10s %10s %14s %14s %14s\n", "k", "N_k", "stars", "lower", "upper", "gap");
    for (const auto& l : st["levels"]) {
        const auto& r = l["report"];
        std::printf("%3d %10lld %10lld %14s %14s %14s\n", r["k"].get<int>(),
                    static_cast<long long>(r["N_k"].get<std::int64_t>()),
                    static_cast<long long>(r["stars"].get<std::int64_t>()), r["lower"]["exact"].get<std::string>().c_str(),
                    r["upper"]["exact"].get<std::string>().c_str(), r["gap"]["exact"].get<std::string>().c_str());
    }
}

void print_tables(const meandim::json& summary) {
    const auto& stages = summary["stages"];
    for (const auto& [name, st] : stages.items()) {
        std::printf("[%s] %s\n", name.c_str(), st.value("pass", false) ? "pass" : "FAIL");
        if (st.contains("error")) {
            std::printf("  %s\n", st["message"].get<std::string>().c_str());
            continue;
        }
        if (name == "plan") print_plan(st);
        else if (name == "construct") print_construct(st);
        else if (name == "certify") print_certify(st);
    }
    std::printf("overall: %s\n", summary["pass"].get<bool>() ? "pass" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band-limited embeddings of minimal subshifts: construction, synthesis and certificates"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--config", f.config, "key=value run configuration; flags override its keys");
    app.add_option("--a", f.a, "left band edge");
    app.add_option("--b", f.b, "right band edge");
    app.add_option("--s", f.s, "target mean dimension");
    app.add_option("--mode", f.mode, "strict or relaxed")->check(CLI::IsMember({"strict", "relaxed"}));
    app.add_option("--p", f.p, "explicit p (with --q --eps0 --c)");
    app.add_option("--q", f.q, "explicit q");
    app.add_option("--eps0", f.eps0, "explicit eps0");
    app.add_option("--c", f.c, "explicit c");
    app.add_option("--eps-sharp", f.eps_sharp, "kernel sharpness in relaxed mode");
    app.add_option("--search-bound", f.search_bound, "largest p, q tried by the parameter search");
    app.add_option("--kmax", f.kmax, "deepest construction level")->check(CLI::PositiveNumber);
    app.add_option("--seed", f.seed, "root seed");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--tol-band", f.tol_band, "minimum in-band energy ratio");
    app.add_option("--tol-roundtrip", f.tol_roundtrip, "coefficient recovery tolerance");
    app.add_option("--window-radius", f.window_radius, "coefficient window half-width in symbols");
    app.add_option("--cert-trials", f.cert_trials, "pairs per sampled certificate");
    bool as_json = false;
    app.add_flag("--json", as_json, "print the full summary as JSON");
    app.add_option("--exp-sign", f.exp_sign, "sign of the phase exponent: + or -")->check(CLI::IsMember({"+", "-"}));

    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"plan", {"plan"}},
        {"construct", {"construct"}},
        {"synth", {"synth"}},
        {"spectrum", {"spectrum", "sampling"}},
        {"certify", {"certify"}},
        {"pipeline", meandim::all_stages()},
    };
    const std::map<std::string, std::string> help{
        {"plan", "derive or check the construction parameters"},
        {"construct", "build the pattern words x^(1..kmax)"},
        {"synth", "build the kernel and the band-limited images"},
        {"spectrum", "spectral estimates and the integer-sampling check"},
        {"certify", "mean-dimension bounds, embedding and minimality evidence"},
        {"pipeline", "every stage in order"},
    };
    std::vector<std::string> stages;
    for (const auto& [name, st] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->callback([&stages, st = st] { stages = st; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const auto cfg = build_config(f);
        const auto res = meandim::run_stages(cfg, stages);
        if (!cfg.out_dir.empty()) meandim::write_artifacts(res.files, cfg.out_dir);
        if (as_json) std::cout << res.summary.dump(2) << '\n';
        else print_tables(res.summary);
        return res.pass() ? 0 : 1;
    } catch (const meandim::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}
