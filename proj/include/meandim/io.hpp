#pragma once

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "meandim/kernel.hpp"
#include "meandim/mdim.hpp"
#include "meandim/params.hpp"
#include "meandim/spectral.hpp"
#include "meandim/symbolic.hpp"
#include "meandim/synthesis.hpp"

namespace meandim {

using json = nlohmann::json;

inline json to_json(const Rational& r) { return json{{"exact", r.str()}, {"value", r.to_double()}}; }

inline json to_json(const ConstructionParams& prm) {
    json j{{"a", prm.a}, {"b", prm.b}, {"s", prm.s}, {"p", prm.p}, {"q", prm.q}, {"eps0", prm.eps0},
           {"c", prm.c}, {"r", to_json(prm.r)}, {"mode", std::string(to_string(prm.mode))}, {"eps_sharp", prm.eps_sharp}};
    return j;
}

inline json to_json(const ValidationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}});
    return json{{"ok", rep.ok()}, {"checks", checks}};
}

inline json symbols_to_json(const SymbolString& s, const std::vector<std::uint8_t>* stars = nullptr) {
    json arr = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (stars && (*stars)[i]) {
            arr.push_back("*");
        } else {
            const auto sym = s[i];
            arr.push_back(std::vector<double>(sym.begin(), sym.end()));
        }
    }
    return arr;
}

inline json to_json(const PatternWord& w) {
    return json{{"level", w.level},
                {"N_k", w.length},
                {"n_k", w.multiplier},
                {"block_length", w.block_length},
                {"tail_count", w.tail_count},
                {"star_positions", w.star_positions},
                {"entries", symbols_to_json(w.entries, &w.star_mask)}};
}

inline PatternWord pattern_from_json(const json& j) {
    PatternWord w;
    w.level = j.at("level").get<int>();
    w.length = j.at("N_k").get<std::int64_t>();
    w.multiplier = j.at("n_k").get<std::int64_t>();
    w.block_length = j.at("block_length").get<std::int64_t>();
    w.tail_count = j.at("tail_count").get<std::int64_t>();
    const auto& entries = j.at("entries");
    if (static_cast<std::int64_t>(entries.size()) != w.length)
        throw Error("symbolic", ErrorCode::ParseError, "entries size does not match N_k");
    std::size_t dim = 0;
    for (const auto& e : entries) if (e.is_array()) { dim = e.size(); break; }
    if (dim == 0) dim = 2; // all-star word; dimension cannot be inferred
    w.entries = SymbolString(dim, static_cast<std::size_t>(w.length));
    w.star_mask.assign(static_cast<std::size_t>(w.length), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].is_string()) {
            if (entries[i].get<std::string>() != "*") throw Error("symbolic", ErrorCode::ParseError, "unknown token");
            w.star_mask[i] = 1;
            w.star_positions.push_back(static_cast<std::int64_t>(i));
        } else {
            const auto vals = entries[i].get<std::vector<double>>();
            if (vals.size() != dim) throw Error("symbolic", ErrorCode::ParseError, "ragged symbol");
            w.entries.set(i, vals);
        }
    }
    if (j.at("star_positions").get<std::vector<std::int64_t>>() != w.star_positions)
        throw Error("symbolic", ErrorCode::ParseError, "star_positions disagree with entries");
    return w;
}

inline json to_json(const SubshiftSegment& seg) {
    return json{{"offset", seg.offset}, {"depth", seg.depth}, {"entries", symbols_to_json(seg.entries)}};
}

inline json to_json(const InterpolationKernel& k) {
    return json{{"u", k.u}, {"v", k.v}, {"t1", k.t1}, {"t2", k.t2}, {"eps_sharp", k.eps_sharp}, {"x0", k.x0}, {"C1", k.C1}};
}

inline json to_json(const CertificateReport& r) {
    return json{{"k", r.k}, {"N_k", r.length}, {"stars", r.stars}, {"lower", to_json(r.lower)},
                {"upper", to_json(r.upper)}, {"target_s", to_json(r.target_s)}, {"gap", to_json(r.gap)},
                {"widim_epsilon", r.widim_epsilon}, {"L", r.L}, {"violations", r.violations}, {"pass", r.pass()},
                {"kind", "exact finite-level identity"}};
}

inline json to_json(const LowerEvidence& e) {
    return json{{"k", e.k}, {"trials", e.trials}, {"violations", e.violations}, {"worst_slack", e.worst_slack},
                {"cube_dim", e.cube_dim}, {"lower_bound", to_json(e.lower_bound)}, {"pass", e.pass()},
                {"kind", "sampled distance-increasing check"}};
}

inline json to_json(const UpperEvidence& e) {
    return json{{"k", e.k}, {"m", e.m}, {"epsilon", e.epsilon}, {"L", e.L}, {"trials", e.trials},
                {"violations", e.violations}, {"max_rho", e.max_rho}, {"dimension_bound", to_json(e.dimension_bound)},
                {"limit", to_json(e.limit)}, {"pass", e.pass()}, {"kind", "sampled epsilon-embedding check"}};
}

inline json to_json(const MinimalityReport& r) {
    return json{{"k", r.level}, {"vacuous", r.vacuous}, {"census_expected", r.census_expected},
                {"census_distinct", r.census_distinct}, {"census_bijective", r.census_bijective},
                {"gap_bound", r.gap_bound}, {"max_gap", r.max_gap}, {"violations", r.violations}, {"pass", r.pass()}};
}

inline json to_json(const SamplingEvidence& e) {
    return json{{"half_band", e.half_band}, {"step", e.step}, {"trials", e.trials}, {"separated", e.separated},
                {"violations", e.violations}, {"min_separation", e.min_separation},
                {"nodes_per_sample", e.nodes_per_sample}, {"pass", e.pass()}};
}

/// Rows x, re, im over [lo, hi] with the given step.
inline std::string kernel_grid_csv(const InterpolationKernel& k, double lo, double hi, double step) {
    std::ostringstream os;
    os << "x,re,im\n";
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const auto v = eval_kernel(k, x);
        os << format_decimal(x) << ',' << format_decimal(v.real()) << ',' << format_decimal(v.imag()) << '\n';
    }
    return os.str();
}

/// Rows x, re, im, err_bound.
template <Signal S>
std::string signal_dump_csv(const S& g, double lo, double hi, double step) {
    std::ostringstream os;
    os << "x,re,im,err_bound\n";
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const auto v = g.eval(x);
        os << format_decimal(x) << ',' << format_decimal(v.real()) << ',' << format_decimal(v.imag()) << ','
           << format_decimal(g.truncation_bound(x)) << '\n';
    }
    return os.str();
}

/// Array of [n, j, re, im].
inline json coeffs_to_json(const BandSignal& g) {
    json arr = json::array();
    const std::int64_t q = g.kernel.v;
    for (std::size_t k = 0; k < g.coeffs.size(); ++k) {
        const std::int64_t m = g.node_min + static_cast<std::int64_t>(k);
        const std::int64_t n = detail::floor_div(m, q);
        arr.push_back(json::array({n, m - n * q, g.coeffs[k].real(), g.coeffs[k].imag()}));
    }
    return arr;
}

inline std::string spectrum_csv(const SpectrumEstimate& est) {
    std::ostringstream os;
    os << "freq,power\n";
    for (std::size_t k = 0; k < est.freqs.size(); ++k)
        os << format_decimal(est.freqs[k]) << ',' << format_decimal(est.power[k]) << '\n';
    return os.str();
}

} // namespace meandim
