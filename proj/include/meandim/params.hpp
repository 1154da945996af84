#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "meandim/error.hpp"
#include "meandim/rational.hpp"

namespace meandim {

enum class Mode { Strict, Relaxed };

inline std::string_view to_string(Mode m) { return m == Mode::Strict ? "strict" : "relaxed"; }

inline Mode parse_mode(std::string_view s) {
    if (s == "strict") return Mode::Strict;
    if (s == "relaxed") return Mode::Relaxed;
    throw Error("params", ErrorCode::ParseError, "unknown mode '" + std::string(s) + "'");
}

/// Kernel sharpness used by relaxed mode when the caller does not pick one.
inline constexpr double kDefaultRelaxedSharpness = 0.25;

/// Scalar parameters of the construction. s is kept as a double and as an
/// exact rational; r = s p / (2q) is exact.
struct ConstructionParams {
    double a = 0;
    double b = 1;
    double s = 0;
    Rational s_exact{};
    std::int64_t p = 1;
    std::int64_t q = 1;
    double eps0 = 0;
    double c = 0;
    Rational r{};
    Mode mode = Mode::Strict;
    /// Interpolation-kernel sharpness. Strict mode pins it to p/q.
    double eps_sharp = 1;

    double ratio() const { return static_cast<double>(q) / static_cast<double>(p); }
    /// Lattice spacing p/q of the synthesis nodes.
    double spacing() const { return static_cast<double>(p) / static_cast<double>(q); }
};

/// Recomputes the derived fields (s_exact, r, strict-mode sharpness) after
/// the primary fields were set by hand.
inline ConstructionParams finalize(ConstructionParams prm) {
    prm.s_exact = Rational::approximate(prm.s);
    prm.r = prm.s_exact * Rational(prm.p, 2 * prm.q);
    if (prm.mode == Mode::Strict) prm.eps_sharp = static_cast<double>(prm.p) / static_cast<double>(prm.q);
    return prm;
}

inline ConstructionParams make_params(double a, double b, double s, std::int64_t p, std::int64_t q,
                                      double eps0, double c, Mode mode = Mode::Strict,
                                      double eps_sharp = kDefaultRelaxedSharpness) {
    ConstructionParams prm;
    prm.a = a; prm.b = b; prm.s = s; prm.p = p; prm.q = q;
    prm.eps0 = eps0; prm.c = c; prm.mode = mode; prm.eps_sharp = eps_sharp;
    return finalize(prm);
}

struct InvariantCheck {
    std::string name;
    bool pass = false;
    /// Signed margin; positive when the inequality holds with room to spare.
    double residual = 0;
};

struct ValidationReport {
    std::vector<InvariantCheck> checks;

    bool ok() const {
        for (const auto& c : checks) if (!c.pass) return false;
        return true;
    }
    const InvariantCheck* find(std::string_view name) const {
        for (const auto& c : checks) if (c.name == name) return &c;
        return nullptr;
    }
    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks) if (!c.pass) out.push_back(c.name);
        return out;
    }
};

/// Strict inequalities between floating quantities must clear this relative
/// margin; a tie that rounding happens to split counts as a failure.
inline constexpr double kStrictMargin = 1e-12;

inline ValidationReport validate_params(const ConstructionParams& prm) {
    ValidationReport rep;
    auto lt = [&](std::string name, double lhs, double rhs) {
        const double margin = kStrictMargin * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        rep.checks.push_back({std::move(name), rhs - lhs > margin, rhs - lhs});
    };
    const double width = prm.b - prm.a;
    const double ratio = prm.ratio();
    lt("a < b", prm.a, prm.b);
    rep.checks.push_back({"s >= 0", prm.s >= 0, prm.s});
    lt("s < 2(b-a)", prm.s, 2 * width);
    rep.checks.push_back({"p >= 1", prm.p >= 1, static_cast<double>(prm.p - 1)});
    rep.checks.push_back({"q >= 1", prm.q >= 1, static_cast<double>(prm.q - 1)});
    if (prm.p < 1 || prm.q < 1) return rep;
    {
        // s/2 < q/p decided exactly.
        const Rational lhs = prm.s_exact * Rational(1, 2);
        const Rational rhs(prm.q, prm.p);
        rep.checks.push_back({"s/2 < q/p", lhs < rhs, (rhs - lhs).to_double()});
    }
    lt("q/p < b-a", ratio, width);
    lt("0 < eps0", 0.0, prm.eps0);
    lt("eps0 < b-a", prm.eps0, width);
    lt("a < c", prm.a, prm.c);
    lt("c < a+eps0/2", prm.c, prm.a + prm.eps0 / 2);
    if (prm.mode == Mode::Strict) {
        lt("q/p+eps0+1 < b-a", ratio + prm.eps0 + 1, width);
    } else {
        rep.checks.push_back({"eps_sharp > 0", prm.eps_sharp > 0, prm.eps_sharp});
        lt("(1+eps_sharp)q/p+eps0 < b-a", (1 + prm.eps_sharp) * ratio + prm.eps0, width);
    }
    {
        const double cp = prm.c * static_cast<double>(prm.p);
        const double nearest = std::round(cp);
        const double off = std::fabs(cp - nearest);
        const bool pass = off < 1e-9 && nearest != 0;
        rep.checks.push_back({"c*p in Z\\{0}", pass, nearest == 0 ? -1.0 : -off});
    }
    rep.checks.push_back({"0 <= r", prm.r >= Rational(0), prm.r.to_double()});
    rep.checks.push_back({"r < 1", prm.r < Rational(1), 1 - prm.r.to_double()});
    {
        const Rational expect = prm.s_exact * Rational(prm.p, 2 * prm.q);
        rep.checks.push_back({"r = s*p/(2q)", expect == prm.r, -std::fabs((expect - prm.r).to_double())});
    }
    return rep;
}

/// Searches p ascending, then q ascending, for the first pair that admits
/// eps0 = slack/2 and a nonzero integer multiple of 1/p inside (a, a+eps0/2).
/// `eps_sharp` is only consulted in relaxed mode.
inline ConstructionParams derive_params(double a, double b, double s, Mode mode, std::int64_t search_bound,
                                        double eps_sharp = kDefaultRelaxedSharpness) {
    if (!(a < b)) throw Error("params", ErrorCode::InvalidArgument, "need a < b");
    if (!(s >= 0 && s < 2 * (b - a))) throw Error("params", ErrorCode::InvalidArgument, "need 0 <= s < 2(b-a)");
    if (search_bound < 1) throw Error("params", ErrorCode::InvalidArgument, "search_bound must be positive");
    if (mode == Mode::Relaxed && !(eps_sharp > 0))
        throw Error("params", ErrorCode::InvalidArgument, "eps_sharp must be positive");
    const Rational half_s = Rational::approximate(s) * Rational(1, 2);
    const double width = b - a;
    for (std::int64_t p = 1; p <= search_bound; ++p) {
        for (std::int64_t q = 1; q <= search_bound; ++q) {
            if (!(half_s < Rational(q, p))) continue;
            const double ratio = static_cast<double>(q) / static_cast<double>(p);
            if (!(ratio < width)) break; // larger q only grows the ratio
            const double sharp = mode == Mode::Strict ? static_cast<double>(p) / static_cast<double>(q) : eps_sharp;
            const double slack = width - (1 + sharp) * ratio;
            if (!(slack > 0)) continue;
            const double eps0 = slack / 2;
            std::int64_t k = static_cast<std::int64_t>(std::floor(a * static_cast<double>(p))) + 1;
            if (k == 0) k = 1;
            const double c = static_cast<double>(k) / static_cast<double>(p);
            if (!(c > a && c < a + eps0 / 2)) continue;
            ConstructionParams prm = make_params(a, b, s, p, q, eps0, c, mode, eps_sharp);
            if (validate_params(prm).ok()) return prm;
        }
    }
    throw Error("params", ErrorCode::Infeasible,
                "no (p, q, eps0, c) with p, q <= " + std::to_string(search_bound) + " satisfies the invariants");
}

/// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_decimal(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_decimal(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error("params", ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
    return v;
}

/// Flat key=value document, one pair per line, fixed key order.
inline std::string serialize_params(const ConstructionParams& prm) {
    std::ostringstream os;
    os << "a=" << format_decimal(prm.a) << '\n'
       << "b=" << format_decimal(prm.b) << '\n'
       << "s=" << format_decimal(prm.s) << '\n'
       << "p=" << prm.p << '\n'
       << "q=" << prm.q << '\n'
       << "eps0=" << format_decimal(prm.eps0) << '\n'
       << "c=" << format_decimal(prm.c) << '\n'
       << "mode=" << to_string(prm.mode) << '\n';
    if (prm.mode == Mode::Relaxed) os << "eps_sharp=" << format_decimal(prm.eps_sharp) << '\n';
    return os.str();
}

/// Parses `key=value` lines. Blank lines and lines starting with '#' are skipped.
inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    int lineno = 0;
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
        return v;
    };
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        ++lineno;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error("params", ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
        out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

inline ConstructionParams deserialize_params(std::string_view text) {
    const auto kv = parse_key_values(text);
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error("params", ErrorCode::ParseError, std::string("missing key '") + key + "'");
        return it->second;
    };
    auto to_int = [](const std::string& s) {
        std::int64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw Error("params", ErrorCode::ParseError, "bad integer '" + s + "'");
        return v;
    };
    const Mode mode = kv.count("mode") ? parse_mode(get("mode")) : Mode::Strict;
    const double sharp = kv.count("eps_sharp") ? parse_decimal(get("eps_sharp")) : kDefaultRelaxedSharpness;
    return make_params(parse_decimal(get("a")), parse_decimal(get("b")), parse_decimal(get("s")),
                       to_int(get("p")), to_int(get("q")), parse_decimal(get("eps0")), parse_decimal(get("c")),
                       mode, sharp);
}

} // namespace meandim
