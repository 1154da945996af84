#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "meandim/meandim.hpp"
#include "support.hpp"

using namespace meandim;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = out.pass && in_time;
    if (!ok) ++failures;
    std::printf("[%s] criterion %d: %s | %s | %.2fs (budget %.0fs)%s\n", ok ? "PASS" : "FAIL", id, title, out.detail.c_str(),
                secs, budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// r < stars/N <= r + 1/N with r = num/den, all in integers.
bool proportion_by_integers(std::int64_t stars, std::int64_t n, const Rational& r) {
    return stars * r.den() > r.num() * n && stars * r.den() <= r.num() * n + r.den();
}

RunConfig worked_config() {
    RunConfig cfg;
    cfg.p = 5;
    cfg.q = 3;
    cfg.eps0 = 0.5;
    cfg.c = 0.2;
    return cfg;
}

} // namespace

int main() {
    const auto worked = testing_support::worked_instance();
    const auto half = testing_support::half_instance();

    criterion(1, "proportion invariant at k = 1, 2", 1, [&] {
        Outcome o;
        std::ostringstream d;
        for (const auto* prm : {&worked, &half}) {
            const Tower t(*prm, 2);
            for (int k = 1; k <= 2; ++k) {
                const auto& w = t.level(k);
                const bool ok = proportion_by_integers(w.star_count(), w.length, prm->r);
                o.pass = o.pass && ok;
                d << "r=" << prm->r.str() << " k=" << k << " " << w.star_count() << "/" << w.length << (ok ? "" : "(bad)")
                  << " ";
            }
        }
        const Tower h(half, 2);
        const bool expected = h.level(1).length == 3 && h.level(1).star_count() == 2 && h.level(2).length == 21 &&
                              h.level(2).star_count() == 11;
        o.pass = o.pass && expected;
        d << (expected ? "r=1/2 counts 3/2, 21/11 as expected" : "r=1/2 counts differ from 3/2, 21/11");
        o.detail = d.str();
        return o;
    });

    criterion(2, "certificate sandwich s < lower <= upper = s + 2q/(pN), gap shrinking", 1, [&] {
        Outcome o;
        std::ostringstream d;
        for (const auto* prm : {&worked, &half}) {
            const Tower t(*prm, 3);
            const Rational s = Rational(2 * prm->q, prm->p) * prm->r;
            std::optional<Rational> prev;
            for (int k = 1; k <= t.depth(); ++k) {
                const auto rep = mdim_report(t, k);
                const auto& w = t.level(k);
                const Rational lower(2 * prm->q * w.star_count(), prm->p * w.length);
                const Rational upper = s + Rational(2 * prm->q, prm->p * w.length);
                bool ok = rep.pass() && rep.lower == lower && rep.upper == upper && s < lower && lower <= upper;
                if (prev) ok = ok && rep.gap < *prev;
                prev = rep.gap;
                o.pass = o.pass && ok;
                d << "k" << k << ":[" << lower.str() << "," << upper.str() << "] ";
            }
            d << "s=" << s.str() << "; ";
        }
        o.detail = d.str();
        return o;
    });

    criterion(3, "kernel interpolation and decay envelope", 10, [&] {
        const auto k = make_kernel(worked);
        const double h = worked.spacing();
        double at0 = std::abs(eval_kernel(k, 0) - Complex(1, 0));
        double nodes = 0;
        for (int n = 1; n <= 1000; ++n) {
            nodes = std::max(nodes, std::abs(eval_kernel(k, h * n)));
            nodes = std::max(nodes, std::abs(eval_kernel(k, -h * n)));
        }
        Stream rng(derive_seed(1, "acceptance.kernel"));
        double worst = 0;
        for (int t = 0; t < 1'000'000; ++t) {
            const double x = rng.uniform(-1000, 1000);
            worst = std::max(worst, std::abs(eval_kernel(k, x)) * (1 + x * x));
        }
        return Outcome{at0 < 1e-12 && nodes < 1e-12 && worst <= k.C1,
                       "|f(0)-1|=" + fmt(at0) + " max|f(node)|=" + fmt(nodes) + " max env=" + fmt(worst) + " C1=" + fmt(k.C1)};
    });

    const Tower tower2(worked, 2);
    const std::int64_t R = 200;
    const auto kernel = make_kernel(worked);
    const double norm = synthesis_norm(kernel);

    criterion(4, "unit ball and coefficient round trip (R = 200)", 30, [&] {
        Stream rng(derive_seed(1, "acceptance.synth"));
        const auto i0 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(worked.p)));
        const auto pt = synthesis_point(tower2, 2, R, rng.below(UINT64_MAX), i0);
        const auto g = synth_F(pt, kernel, norm, R);
        const auto gg = apply_G(g, i0, worked.c);
        const double reach = kernel.spacing() * static_cast<double>(R * worked.q);
        double mx = 0;
        for (int t = 0; t < 10'000; ++t) {
            const double x = rng.uniform(-reach, reach);
            mx = std::max({mx, std::abs(g.eval(x)), std::abs(gg.eval(x))});
        }
        double err = 0, bound = 0;
        std::int64_t over = 0;
        for (const auto& rc : recover_coeffs(g, i0, -R, R)) {
            const auto sym = pt.segment.at(rc.n);
            const Complex truth(sym[static_cast<std::size_t>(2 * rc.j)], sym[static_cast<std::size_t>(2 * rc.j + 1)]);
            const double e = std::abs(rc.value - truth);
            err = std::max(err, e);
            bound = std::max(bound, rc.error_bound);
            if (e > rc.error_bound + 1e-12) ++over;
        }
        return Outcome{mx <= 1 + 1e-9 && err < 1e-3 && over == 0,
                       "max|g|=" + fmt(mx) + " round-trip err=" + fmt(err) + " max bound=" + fmt(bound) +
                           " over-bound=" + std::to_string(over)};
    });

    criterion(5, "equivariance F S = T F and G T = sigma G", 30, [&] {
        Stream rng(derive_seed(1, "acceptance.equivariance"));
        const auto pt = synthesis_point(tower2, 2, R, rng.below(UINT64_MAX), 0);
        const double half_reach = kernel.spacing() * static_cast<double>(R * worked.q) / 2;
        std::int64_t v1 = 0, v2 = 0;
        double r1 = 0, r2 = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(worked.p)));
            const SkewPoint base{pt.segment, i};
            const auto f0 = synth_F(base, kernel, norm, R);
            const auto lhs = synth_F(skew_S(base, worked.p, R), kernel, norm, R);
            const auto rhs = skew_T(f0);
            const double x = rng.uniform(-half_reach, half_reach);
            const double d1 = std::abs(lhs.eval(x) - rhs.eval(x));
            const double b1 = lhs.truncation_bound(x) + rhs.truncation_bound(x) + 1e-12;
            r1 = std::max(r1, d1 / b1);
            if (d1 > b1) ++v1;
            const auto gl = apply_G(rhs, rhs.counter, worked.c);
            const auto gr = time_shift(apply_G(f0, i, worked.c), 1.0);
            const double d2 = std::abs(gl.eval(x) - gr.eval(x));
            const double b2 = gl.truncation_bound(x) + gr.truncation_bound(x) + 1e-12;
            r2 = std::max(r2, d2 / b2);
            if (d2 > b2) ++v2;
        }
        return Outcome{v1 == 0 && v2 == 0, "FS/TF violations=" + std::to_string(v1) + " worst err/bound=" + fmt(r1) +
                                               "; GT/sigmaG violations=" + std::to_string(v2) + " worst=" + fmt(r2)};
    });

    criterion(6, "distance-increasing embedding of B_k (k <= 2)", 10, [&] {
        Outcome o;
        for (int k = 1; k <= 2; ++k) {
            const auto ev = lower_certificate(tower2, k, 1000, derive_seed(1, "acceptance.lower." + std::to_string(k)));
            o.pass = o.pass && ev.pass();
            o.detail += "k" + std::to_string(k) + ": violations=" + std::to_string(ev.violations) +
                        " worst slack=" + fmt(ev.worst_slack) + " ";
        }
        return o;
    });

    criterion(7, "epsilon-embedding collisions for eps in {0.5, 0.1}, m in {N, 2N}", 30, [&] {
        Outcome o;
        for (int k = 1; k <= 2; ++k) {
            const std::int64_t n = tower2.level(k).length;
            for (double eps : {0.5, 0.1})
                for (std::int64_t m : {n, 2 * n}) {
                    const auto ev = upper_certificate(tower2, k, m, eps, 1000,
                                                      derive_seed(1, "acceptance.upper." + std::to_string(k) + "." +
                                                                         format_decimal(eps) + "." + std::to_string(m)));
                    o.pass = o.pass && ev.pass();
                    o.detail += "k" + std::to_string(k) + ",eps=" + format_decimal(eps) + ",m=" + std::to_string(m) +
                                ": max rho=" + fmt(ev.max_rho) + (ev.pass() ? " " : "(violated) ");
                }
        }
        return o;
    });

    criterion(8, "recurrence gaps <= 2 N_k in 10 N_k segments, bijective census", 10, [&] {
        Outcome o;
        for (const auto* prm : {&worked, &half}) {
            const Tower t(*prm, 2);
            const int k = 2;
            const std::int64_t n = t.level(k).length;
            const auto seg = generate_segment(t, k, 10 * n, derive_seed(1, "acceptance.minimality"), FillMode::Random);
            const auto rep = minimality_evidence(t, k, seg, 1e-9);
            const bool ok = rep.pass() && !rep.vacuous && rep.census_bijective && rep.max_gap <= 2 * n;
            o.pass = o.pass && ok;
            o.detail += "r=" + prm->r.str() + ": max gap " + std::to_string(rep.max_gap) + " <= " +
                        std::to_string(2 * n) + ", census " + std::to_string(rep.census_distinct) + "/" +
                        std::to_string(rep.census_expected) + " ";
        }
        // 4-point fill
        const auto w1 = initial_word(half);
        const auto fill = dense_set(3, AlphabetSpec{half.q});
        const auto w2 = next_level(w1, fill, half);
        std::set<std::vector<double>> seen;
        bool members = true;
        for (std::int64_t j = w2.tail_begin_block(); j < w2.multiplier; ++j) {
            const auto blk = w2.entries.slice(static_cast<std::size_t>(j * w1.length), static_cast<std::size_t>(w1.length));
            members = members && membership(blk, w1, 1e-12);
            std::vector<double> flat;
            for (std::size_t l = 0; l < blk.size(); ++l) {
                const auto sym = blk[l];
                flat.insert(flat.end(), sym.begin(), sym.end());
            }
            seen.insert(flat);
        }
        std::int64_t expected = 1;
        for (std::int64_t t = 0; t < w1.star_count(); ++t) expected *= static_cast<std::int64_t>(fill.size());
        const bool census = members && w2.tail_count == expected && static_cast<std::int64_t>(seen.size()) == expected;
        o.pass = o.pass && census;
        o.detail += "4-point fill census " + std::to_string(seen.size()) + "/" + std::to_string(expected);
        return o;
    });

    criterion(9, "spectral band concentration, line at c, symmetric realified spectrum", 60, [&] {
        const auto st = stage_spectrum(tower2, worked_config());
        const double f = st["F"]["ratio"], g = st["G"]["ratio"], r = st["realified"]["ratio"];
        const double peak = st["G"]["peak"], sym = st["realified"]["symmetry_error"];
        const bool in_band = st["G"]["line_in_stated_band"];
        const bool ok = st["pass"].get<bool>() && f >= 0.99 && g >= 0.99 && r >= 0.99 && in_band;
        return Outcome{ok, "F " + fmt(f) + ", G " + fmt(g) + " (peak " + fmt(peak) + "), realified " + fmt(r) +
                               " symmetry err " + fmt(sym)};
    });

    criterion(10, "sampling injectivity at 2a'd = 0.8, refusal at 1.2, samples in [0,1]", 30, [&] {
        auto cfg = worked_config();
        cfg.sampling_trials = 100;
        const auto st = stage_sampling(tower2, cfg);
        const auto& inj = st["injectivity"];
        const bool ok = st["pass"].get<bool>() && inj["separated"] == 100 && st["refusal"]["refused"].get<bool>() &&
                        st["samples"]["in_unit_interval"].get<bool>();
        return Outcome{ok, "separated " + inj["separated"].dump() + "/100, refusal " + st["refusal"]["error"].get<std::string>() +
                               ", samples in [0,1]: " + st["samples"]["in_unit_interval"].dump()};
    });

    criterion(11, "pipeline determinism", 180, [&] {
        const auto a = run_pipeline(worked_config());
        const auto b = run_pipeline(worked_config());
        const auto ca = canonical_summary(a.summary).dump(), cb = canonical_summary(b.summary).dump();
        return Outcome{ca == cb && a.pass(), std::string(ca == cb ? "identical" : "different") + " summaries (" +
                                                  std::to_string(ca.size()) + " bytes), pipeline pass=" +
                                                  (a.pass() ? "true" : "false")};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
