#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "meandim/rational.hpp"
#include "meandim/rng.hpp"
#include "meandim/skew.hpp"
#include "meandim/symbolic.hpp"

namespace meandim {

/// Reference point z: every free coordinate set to the zero symbol, covering
/// [first, first + length) at the tower's deepest level.
inline SubshiftSegment reference_point(const Tower& tower, std::int64_t first, std::int64_t length) {
    const int depth = tower.depth();
    length = std::max(length, tower.level(depth).length);
    return generate_segment(tower, depth, length, 0, FillMode::Zero, first);
}

/// A uniformly random member of B_k.
inline SymbolString random_block(const PatternWord& w, Stream& rng) {
    SymbolString out = w.entries;
    for (const auto pos : w.star_positions)
        for (auto& v : out.at(static_cast<std::size_t>(pos))) v = rng.uniform();
    return out;
}

/// F_k(a) = ((c_n), 0) with c = a on [0, N_k) and z elsewhere; the window
/// covers [-trunc, N_k - 1 + trunc].
inline SkewPoint embed_block(const Tower& tower, const SymbolString& block, std::int64_t trunc) {
    const auto n = static_cast<std::int64_t>(block.size());
    SkewPoint pt;
    pt.segment = reference_point(tower, -trunc, n + 2 * trunc);
    for (std::int64_t c = 0; c < n; ++c) pt.segment.entries.set(static_cast<std::size_t>(c + pt.segment.offset), block[static_cast<std::size_t>(c)]);
    pt.i = 0;
    return pt;
}

struct DistancePair {
    double block_distance = 0; // ||a - b||_inf
    double rho = 0;            // rho_{N_k p}(F_k a, F_k b), truncated (a lower bound)
};

inline DistancePair lower_certificate_pair(const Tower& tower, int k, const SymbolString& a, const SymbolString& b,
                                           std::int64_t trunc = 24) {
    const PatternWord& w = tower.level(k);
    double lhs = 0;
    for (std::size_t n = 0; n < a.size(); ++n) lhs = std::max(lhs, symbol_distance(a[n], b[n]));
    const std::int64_t p = tower.params().p;
    const auto rho = metric_rho_n(embed_block(tower, a, trunc), embed_block(tower, b, trunc), w.length * p, p, trunc);
    return {lhs, rho.value};
}

struct LowerEvidence {
    int k = 0;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    /// min over trials of rho - ||a - b||; nonnegative when the map is distance-increasing.
    double worst_slack = 0;
    /// Dimension of the free-coordinate cube, 2q |*_k|.
    std::int64_t cube_dim = 0;
    Rational lower_bound{}; // cube_dim / (N_k p)

    bool pass() const { return violations == 0; }
};

inline constexpr double kDistanceSlack = 1e-12;

/// Samples pairs in B_k and checks ||a - b|| <= rho_{N_k p}(F_k a, F_k b).
inline LowerEvidence lower_certificate(const Tower& tower, int k, std::int64_t trials, std::uint64_t seed,
                                       std::int64_t trunc = 24) {
    const PatternWord& w = tower.level(k);
    const auto& prm = tower.params();
    LowerEvidence ev;
    ev.k = k;
    ev.trials = trials;
    ev.cube_dim = 2 * prm.q * w.star_count();
    ev.lower_bound = Rational(ev.cube_dim, w.length * prm.p);
    ev.worst_slack = std::numeric_limits<double>::infinity();
    Stream rng(seed);
    for (std::int64_t t = 0; t < trials; ++t) {
        const SymbolString a = random_block(w, rng);
        const SymbolString b = random_block(w, rng);
        const auto pr = lower_certificate_pair(tower, k, a, b, trunc);
        const double slack = pr.rho - pr.block_distance;
        ev.worst_slack = std::min(ev.worst_slack, slack);
        if (slack < -kDistanceSlack) ++ev.violations;
    }
    if (trials == 0) ev.worst_slack = 0;
    return ev;
}

/// L(eps) = ceil(log2(2/eps)) + 1: agreement on [-L, L] keeps D1 below
/// 2^{-L+1} <= eps/2.
inline std::int64_t window_half_length(double eps) {
    if (!(eps > 0)) throw Error("mdim", ErrorCode::InvalidArgument, "epsilon must be positive");
    return static_cast<std::int64_t>(std::ceil(std::log2(2 / eps))) + 1;
}

/// (ceil((2L + m + 2) / N_k) + 1) * 2 N_k q (r + 1/N_k) / (m p).
inline Rational upper_dimension_bound(const Tower& tower, int k, std::int64_t m, std::int64_t L) {
    const auto& prm = tower.params();
    const std::int64_t n = tower.level(k).length;
    const std::int64_t blocks = (2 * L + m + 2 + n - 1) / n + 1;
    const Rational per_block = Rational(2 * prm.q) * (prm.r * Rational(n) + Rational(1));
    return Rational(blocks) * per_block / Rational(m * prm.p);
}

/// (2q/p)(r + 1/N_k), the m -> infinity limit of the bound above.
inline Rational upper_limit(const Tower& tower, int k) {
    const auto& prm = tower.params();
    return Rational(2 * prm.q, prm.p) * (prm.r + Rational(1, tower.level(k).length));
}

struct UpperEvidence {
    int k = 0;
    std::int64_t m = 0;
    double epsilon = 0;
    std::int64_t L = 0;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    /// Largest measured rho_{mp} upper estimate (truncated value + tail bound).
    double max_rho = 0;
    Rational dimension_bound{};
    Rational limit{};

    bool pass() const { return violations == 0; }
};

/// Pairs of Y_k points that agree on [-L, L+m+1] with equal Z_p coordinate
/// (collisions of H_{k,m}) must be within epsilon in rho_{mp}.
inline UpperEvidence upper_certificate(const Tower& tower, int k, std::int64_t m, double eps, std::int64_t trials,
                                       std::uint64_t seed, std::int64_t trunc = 48) {
    const auto& prm = tower.params();
    const PatternWord& w = tower.level(k);
    UpperEvidence ev;
    ev.k = k;
    ev.m = m;
    ev.epsilon = eps;
    ev.L = window_half_length(eps);
    ev.trials = trials;
    ev.dimension_bound = upper_dimension_bound(tower, k, m, ev.L);
    ev.limit = upper_limit(tower, k);
    trunc = std::max(trunc, ev.L + 2);
    Stream rng(seed);
    const std::int64_t first = -trunc - w.length;
    const std::int64_t length = m + 2 * trunc + 2 * w.length + 4;
    for (std::int64_t t = 0; t < trials; ++t) {
        SkewPoint x, y;
        x.segment = generate_segment(tower, k, length, rng.below(UINT64_MAX), FillMode::Random, first);
        y.segment = generate_segment(tower, k, length, rng.below(UINT64_MAX), FillMode::Random, first);
        // Common shift moves the alignment; both stay in Y_k.
        const auto shift = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(w.length)));
        x.segment.offset += shift;
        y.segment.offset += shift;
        for (std::int64_t c = -ev.L; c <= ev.L + m + 1; ++c)
            y.segment.entries.set(static_cast<std::size_t>(c + y.segment.offset), x.segment.at(c));
        x.i = y.i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(prm.p)));
        const auto rho = metric_rho_n(x, y, m * prm.p, prm.p, trunc);
        const double upper = rho.value + rho.tail_bound;
        ev.max_rho = std::max(ev.max_rho, upper);
        if (!(upper < eps)) ++ev.violations;
    }
    return ev;
}

struct CertificateReport {
    int k = 0;
    std::int64_t length = 0; // N_k
    std::int64_t stars = 0;
    Rational lower{};
    Rational upper{};
    Rational target_s{};
    Rational gap{};
    double widim_epsilon = 0;
    std::int64_t L = 0;
    std::vector<std::string> violations;

    bool pass() const { return violations.empty(); }
};

/// Exact finite-level bounds: lower = 2q|*_k| / (N_k p), upper = (2q/p)(r + 1/N_k).
inline CertificateReport mdim_report(const Tower& tower, int k, double widim_epsilon = 0.1) {
    const auto& prm = tower.params();
    const PatternWord& w = tower.level(k);
    CertificateReport rep;
    rep.k = k;
    rep.length = w.length;
    rep.stars = w.star_count();
    rep.lower = Rational(2 * prm.q * rep.stars, w.length * prm.p);
    rep.upper = upper_limit(tower, k);
    rep.target_s = Rational(2 * prm.q, prm.p) * prm.r;
    rep.gap = rep.upper - rep.lower;
    rep.widim_epsilon = widim_epsilon;
    rep.L = window_half_length(widim_epsilon);
    if (!(rep.target_s < rep.lower)) rep.violations.push_back("s < lower_k fails");
    if (!(rep.lower <= rep.upper)) rep.violations.push_back("lower_k <= upper_k fails");
    if (rep.upper != rep.target_s + Rational(2 * prm.q, prm.p * w.length))
        rep.violations.push_back("upper_k != s + 2q/(p N_k)");
    if (rep.gap < Rational(0)) rep.violations.push_back("negative gap");
    return rep;
}

} // namespace meandim
