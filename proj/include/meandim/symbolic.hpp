#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meandim/error.hpp"
#include "meandim/params.hpp"
#include "meandim/rational.hpp"
#include "meandim/rng.hpp"

namespace meandim {

/// Symbols are points of K = ([0,1]^2)^q, stored as 2q doubles laid out as
/// (a^{0,1}, a^{0,2}, a^{1,1}, a^{1,2}, ...).
struct AlphabetSpec {
    std::int64_t q = 1;
    std::size_t dim() const { return static_cast<std::size_t>(2 * q); }
};

using SymbolView = std::span<const double>;

/// max over the 2q coordinates of |a - b|; this is the max over j of the
/// per-pair max norm, so K has diameter 1.
inline double symbol_distance(SymbolView a, SymbolView b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

/// Contiguous array of symbols of a fixed dimension.
class SymbolString {
public:
    SymbolString() = default;
    SymbolString(std::size_t dim, std::size_t count, double fill = 0.0) : dim_(dim), data_(dim * count, fill) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return data_.empty(); }

    SymbolView operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> at(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    void push_back(SymbolView s) { data_.insert(data_.end(), s.begin(), s.end()); }
    void append(const SymbolString& other) { data_.insert(data_.end(), other.data_.begin(), other.data_.end()); }
    void reserve(std::size_t count) { data_.reserve(count * dim_); }
    void set(std::size_t i, SymbolView s) { std::copy(s.begin(), s.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * dim_)); }

    SymbolString slice(std::size_t first, std::size_t count) const {
        SymbolString out;
        out.dim_ = dim_;
        out.data_.assign(data_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                         data_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_));
        return out;
    }

    const std::vector<double>& raw() const noexcept { return data_; }
    friend bool operator==(const SymbolString&, const SymbolString&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// A 1/m-dense subset of K: the product grid with per-axis points
/// (2i-1)/(2g), g = ceil(m/2).
struct DenseSet {
    std::int64_t m = 1;
    AlphabetSpec alphabet;
    std::vector<double> axis;
    SymbolString points;

    std::size_t size() const { return points.size(); }

    /// Index of the grid point within `tol` of `s`, decoded axis by axis.
    std::optional<std::size_t> index_of(SymbolView s, double tol) const {
        const auto g = axis.size();
        std::size_t idx = 0;
        for (std::size_t c = 0; c < s.size(); ++c) {
            const auto it = std::min_element(axis.begin(), axis.end(), [&](double u, double v) {
                return std::fabs(u - s[c]) < std::fabs(v - s[c]);
            });
            if (std::fabs(*it - s[c]) > tol) return std::nullopt;
            idx = idx * g + static_cast<std::size_t>(it - axis.begin());
        }
        return idx;
    }
};

/// Caps that keep the construction at desk scale.
struct SizeLimits {
    std::int64_t max_word_length = std::int64_t{1} << 23;
    std::int64_t max_tail_blocks = std::int64_t{1} << 20;
    std::int64_t max_dense_points = std::int64_t{1} << 16;
};

namespace detail {
// Saturating power; returns nullopt once base^exp exceeds cap.
inline std::optional<std::int64_t> checked_pow(std::int64_t base, std::int64_t exp, std::int64_t cap) {
    std::int64_t v = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
        if (base != 0 && v > cap / base) return std::nullopt;
        v *= base;
    }
    if (v > cap) return std::nullopt;
    return v;
}
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }
} // namespace detail

inline DenseSet dense_set(std::int64_t m, AlphabetSpec alphabet, const SizeLimits& limits = {}) {
    if (m < 1) throw Error("symbolic", ErrorCode::InvalidArgument, "dense_set needs m >= 1");
    const std::int64_t g = (m + 1) / 2;
    const auto dim = static_cast<std::int64_t>(alphabet.dim());
    const auto count = detail::checked_pow(g, dim, limits.max_dense_points);
    if (!count)
        throw Error("symbolic", ErrorCode::SizeOverflow,
                    "dense set with " + std::to_string(g) + "^" + std::to_string(dim) + " points exceeds cap");
    DenseSet ds;
    ds.m = m;
    ds.alphabet = alphabet;
    for (std::int64_t i = 1; i <= g; ++i) ds.axis.push_back(static_cast<double>(2 * i - 1) / static_cast<double>(2 * g));
    ds.points = SymbolString(alphabet.dim(), static_cast<std::size_t>(*count));
    for (std::int64_t idx = 0; idx < *count; ++idx) {
        auto sym = ds.points.at(static_cast<std::size_t>(idx));
        std::int64_t rest = idx;
        for (std::int64_t c = dim - 1; c >= 0; --c) {
            sym[static_cast<std::size_t>(c)] = ds.axis[static_cast<std::size_t>(rest % g)];
            rest /= g;
        }
    }
    return ds;
}

/// Level-k word x^(k) over K ∪ {*}. Star entries hold zeros in `entries`
/// and are flagged in `star_mask`.
struct PatternWord {
    int level = 1;
    std::int64_t length = 0;     // N_k
    std::int64_t multiplier = 0; // n_k
    SymbolString entries;
    std::vector<std::uint8_t> star_mask;
    std::vector<std::int64_t> star_positions;
    // Layout relative to the previous level: blocks of length block_length,
    // the last tail_count of which are the filled skeletons.
    std::int64_t block_length = 1;
    std::int64_t tail_count = 0;

    std::int64_t star_count() const { return static_cast<std::int64_t>(star_positions.size()); }
    bool is_star(std::int64_t i) const { return star_mask[static_cast<std::size_t>(i)] != 0; }
    std::int64_t tail_begin_block() const { return multiplier - tail_count; }
    Rational proportion() const { return Rational(star_count(), length); }
};

/// r < stars/N <= r + 1/N in exact arithmetic.
inline bool proportion_holds(std::int64_t stars, std::int64_t length, const Rational& r) {
    const Rational prop(stars, length);
    return r < prop && prop <= r + Rational(1, length);
}

/// The only star count admitted by the proportion rule: floor(rN) + 1.
inline std::int64_t admissible_star_count(const Rational& r, std::int64_t length) {
    return (r * Rational(length)).floor() + 1;
}

/// x^(1): the least N >= hint whose admissible star count leaves at least one
/// non-star entry; stars lead, the rest is the centre of K.
inline PatternWord initial_word(const ConstructionParams& prm, std::optional<std::int64_t> length_hint = {}) {
    if (!(prm.r >= Rational(0) && prm.r < Rational(1)))
        throw Error("symbolic", ErrorCode::InvalidArgument, "r must lie in [0, 1)");
    std::int64_t n = std::max<std::int64_t>(1, length_hint.value_or(1));
    while (admissible_star_count(prm.r, n) >= n) ++n;
    const std::int64_t stars = admissible_star_count(prm.r, n);
    const AlphabetSpec alpha{prm.q};
    PatternWord w;
    w.level = 1;
    w.length = n;
    w.multiplier = n;
    w.block_length = 1;
    w.tail_count = 0;
    w.entries = SymbolString(alpha.dim(), static_cast<std::size_t>(n), 0.5);
    w.star_mask.assign(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < stars; ++i) {
        w.star_mask[static_cast<std::size_t>(i)] = 1;
        w.star_positions.push_back(i);
        auto sym = w.entries.at(static_cast<std::size_t>(i));
        std::fill(sym.begin(), sym.end(), 0.0);
    }
    return w;
}

/// x^(k) from x^(k-1): copies of the previous word followed by one filled
/// skeleton per tuple of `fill` points (lexicographic), then stars are
/// replaced by the zero symbol from the end until the proportion rule holds.
inline PatternWord next_level(const PatternWord& prev, const DenseSet& fill, const ConstructionParams& prm,
                              const SizeLimits& limits = {}) {
    const std::int64_t prev_len = prev.length;
    const std::int64_t prev_stars = prev.star_count();
    const auto fill_size = static_cast<std::int64_t>(fill.size());
    const auto tails = detail::checked_pow(fill_size, prev_stars, limits.max_tail_blocks);
    if (!tails)
        throw Error("symbolic", ErrorCode::SizeOverflow,
                    std::to_string(fill_size) + "^" + std::to_string(prev_stars) + " tail blocks exceeds cap");
    const std::int64_t tail_count = *tails;

    // Least n with (n*s - M*N) / (n*N) > r, i.e. n > M*N / (s - r*N).
    const Rational margin = Rational(prev_stars) - prm.r * Rational(prev_len);
    if (!(margin > Rational(0)))
        throw Error("symbolic", ErrorCode::InvalidArgument, "previous word violates the proportion rule");
    const Rational bound = Rational(tail_count) * Rational(prev_len) / margin;
    const std::int64_t mult = bound.floor() + 1;

    if (mult > limits.max_word_length / prev_len)
        throw Error("symbolic", ErrorCode::SizeOverflow,
                    "N_" + std::to_string(prev.level + 1) + " = " + std::to_string(mult) + "*" +
                        std::to_string(prev_len) + " exceeds cap");
    const std::int64_t length = mult * prev_len;

    PatternWord w;
    w.level = prev.level + 1;
    w.length = length;
    w.multiplier = mult;
    w.block_length = prev_len;
    w.tail_count = tail_count;
    w.entries = SymbolString(prev.entries.dim(), 0);
    w.entries.reserve(static_cast<std::size_t>(length));
    w.star_mask.reserve(static_cast<std::size_t>(length));

    for (std::int64_t j = 0; j < mult - tail_count; ++j) {
        w.entries.append(prev.entries);
        w.star_mask.insert(w.star_mask.end(), prev.star_mask.begin(), prev.star_mask.end());
    }
    std::vector<std::int64_t> digits(static_cast<std::size_t>(prev_stars), 0);
    for (std::int64_t t = 0; t < tail_count; ++t) {
        std::int64_t rest = t;
        for (std::int64_t d = prev_stars - 1; d >= 0; --d) {
            digits[static_cast<std::size_t>(d)] = rest % fill_size;
            rest /= fill_size;
        }
        const auto base = w.entries.size();
        w.entries.append(prev.entries);
        for (std::int64_t d = 0; d < prev_stars; ++d) {
            const auto pos = static_cast<std::size_t>(prev.star_positions[static_cast<std::size_t>(d)]);
            w.entries.set(base + pos, fill.points[static_cast<std::size_t>(digits[static_cast<std::size_t>(d)])]);
        }
        w.star_mask.insert(w.star_mask.end(), static_cast<std::size_t>(prev_len), 0);
    }

    const std::int64_t target = admissible_star_count(prm.r, length);
    std::int64_t count = 0;
    for (auto m : w.star_mask) count += m;
    for (std::int64_t i = length - 1; i >= 0 && count > target; --i) {
        if (w.star_mask[static_cast<std::size_t>(i)]) {
            w.star_mask[static_cast<std::size_t>(i)] = 0;
            --count;
        }
    }
    for (std::int64_t i = 0; i < length; ++i)
        if (w.star_mask[static_cast<std::size_t>(i)]) w.star_positions.push_back(i);
    return w;
}

/// x^(1), ..., x^(depth) together with the dense sets used to fill them.
class Tower {
public:
    Tower(ConstructionParams prm, int depth, const SizeLimits& limits = {},
          std::optional<std::int64_t> length_hint = {})
        : params_(std::move(prm)), limits_(limits) {
        if (depth < 1) throw Error("symbolic", ErrorCode::InvalidArgument, "depth must be >= 1");
        levels_.push_back(initial_word(params_, length_hint));
        for (int k = 2; k <= depth; ++k) {
            fills_.push_back(dense_set(k - 1, AlphabetSpec{params_.q}, limits_));
            levels_.push_back(next_level(levels_.back(), fills_.back(), params_, limits_));
        }
    }

    const ConstructionParams& params() const noexcept { return params_; }
    int depth() const noexcept { return static_cast<int>(levels_.size()); }
    AlphabetSpec alphabet() const { return AlphabetSpec{params_.q}; }
    const SizeLimits& limits() const noexcept { return limits_; }

    /// Level k in [1, depth].
    const PatternWord& level(int k) const {
        if (k < 1 || k > depth())
            throw Error("symbolic", ErrorCode::InvalidArgument, "level " + std::to_string(k) + " not constructed");
        return levels_[static_cast<std::size_t>(k - 1)];
    }
    /// Dense set P_{k-1} that filled the tail blocks of level k (k >= 2).
    const DenseSet& fill_for(int k) const {
        if (k < 2 || k > depth()) throw Error("symbolic", ErrorCode::InvalidArgument, "no fill for level " + std::to_string(k));
        return fills_[static_cast<std::size_t>(k - 2)];
    }

private:
    ConstructionParams params_;
    SizeLimits limits_;
    std::vector<PatternWord> levels_;
    std::vector<DenseSet> fills_;
};

/// Finite window of a point of K^Z: coordinate n lives at entries[offset + n].
struct SubshiftSegment {
    std::int64_t offset = 0;
    SymbolString entries;
    int depth = 0;

    std::int64_t first_coord() const { return -offset; }
    std::int64_t end_coord() const { return static_cast<std::int64_t>(entries.size()) - offset; }
    bool covers(std::int64_t lo, std::int64_t hi) const { return lo >= first_coord() && hi < end_coord(); }
    SymbolView at(std::int64_t coord) const { return entries[static_cast<std::size_t>(coord + offset)]; }
    std::span<double> mutable_at(std::int64_t coord) { return entries.at(static_cast<std::size_t>(coord + offset)); }
};

namespace detail {
inline bool block_matches(const SymbolString& data, std::size_t start, const PatternWord& pattern, double tol) {
    for (std::int64_t n = 0; n < pattern.length; ++n) {
        if (pattern.is_star(n)) continue;
        if (symbol_distance(data[start + static_cast<std::size_t>(n)], pattern.entries[static_cast<std::size_t>(n)]) > tol)
            return false;
    }
    return true;
}
} // namespace detail

/// Is `word` a member of B_k, the set of fillings of the pattern's stars?
inline bool membership(const SymbolString& word, const PatternWord& pattern, double tol) {
    if (static_cast<std::int64_t>(word.size()) != pattern.length)
        throw Error("symbolic", ErrorCode::LengthMismatch,
                    "word length " + std::to_string(word.size()) + " != N_k = " + std::to_string(pattern.length));
    return detail::block_matches(word, 0, pattern, tol);
}

/// Least alignment m in [0, N_k) such that every full block starting at a
/// coordinate congruent to m mod N_k lies in B_k.
inline std::optional<std::int64_t> window_admissible(const SubshiftSegment& seg, const PatternWord& pattern, double tol) {
    const auto len = static_cast<std::int64_t>(seg.entries.size());
    const std::int64_t n = pattern.length;
    if (len < 2 * n)
        throw Error("symbolic", ErrorCode::SegmentTooShort,
                    "segment length " + std::to_string(len) + " < 2 N_k = " + std::to_string(2 * n));
    for (std::int64_t m = 0; m < n; ++m) {
        // First local index whose coordinate is congruent to m.
        const std::int64_t start = detail::floor_mod(m + seg.offset, n);
        bool ok = true;
        for (std::int64_t s = start; s + n <= len && ok; s += n)
            ok = detail::block_matches(seg.entries, static_cast<std::size_t>(s), pattern, tol);
        if (ok) return m;
    }
    return std::nullopt;
}

enum class FillMode { Random, Zero };

/// Periodic concatenation of level-`depth` blocks aligned at coordinate 0,
/// covering coordinates [first_coord, first_coord + length). Star entries are
/// drawn uniformly from K (Random) or set to the zero symbol (Zero); the
/// latter is the reference point z.
inline SubshiftSegment generate_segment(const Tower& tower, int depth, std::int64_t length, std::uint64_t seed,
                                        FillMode mode, std::int64_t first_coord = 0) {
    const PatternWord& w = tower.level(depth);
    if (length < w.length)
        throw Error("symbolic", ErrorCode::SegmentTooShort,
                    "segment length " + std::to_string(length) + " < N_k = " + std::to_string(w.length));
    if (length > tower.limits().max_word_length)
        throw Error("symbolic", ErrorCode::SizeOverflow, "segment too long");
    SubshiftSegment seg;
    seg.offset = -first_coord;
    seg.depth = depth;
    seg.entries = SymbolString(w.entries.dim(), static_cast<std::size_t>(length));
    Stream rng(seed);
    for (std::int64_t i = 0; i < length; ++i) {
        const std::int64_t pos = detail::floor_mod(first_coord + i, w.length);
        auto dst = seg.entries.at(static_cast<std::size_t>(i));
        if (w.is_star(pos)) {
            for (auto& v : dst) v = mode == FillMode::Random ? rng.uniform() : 0.0;
        } else {
            const auto src = w.entries[static_cast<std::size_t>(pos)];
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    return seg;
}

struct MinimalityReport {
    int level = 0;
    bool vacuous = false;
    std::int64_t census_expected = 0;
    std::int64_t census_distinct = 0;
    bool census_bijective = false;
    std::int64_t gap_bound = 0;
    std::int64_t max_gap = 0;
    std::vector<std::string> violations;

    bool pass() const { return violations.empty(); }
};

/// Finite-scale recurrence evidence at level k >= 2. The tail blocks of x^(k)
/// must decode to every tuple of P_{k-1} points exactly once, and every such
/// filled level-(k-1) block must recur in the segment with gaps <= 2 N_k
/// (leading and trailing stretches included).
inline MinimalityReport minimality_evidence(const Tower& tower, int k, const SubshiftSegment& seg, double tol) {
    MinimalityReport rep;
    rep.level = k;
    const PatternWord& word = tower.level(k);
    rep.gap_bound = 2 * word.length;
    if (k < 2) {
        rep.vacuous = true;
        rep.census_bijective = true;
        return rep;
    }
    const PatternWord& prev = tower.level(k - 1);
    const DenseSet& fill = tower.fill_for(k);
    const std::int64_t block = prev.length;
    const auto g = static_cast<std::int64_t>(fill.size());
    const auto expected = detail::checked_pow(g, prev.star_count(), std::numeric_limits<std::int64_t>::max());
    rep.census_expected = expected.value_or(-1);

    std::vector<std::int64_t> seen(static_cast<std::size_t>(std::max<std::int64_t>(rep.census_expected, 0)), 0);
    const std::int64_t first_tail = word.multiplier - word.tail_count;
    for (std::int64_t j = first_tail; j < word.multiplier; ++j) {
        const auto base = static_cast<std::size_t>(j * block);
        std::int64_t tuple = 0;
        bool decoded = true;
        for (std::int64_t l = 0; l < block && decoded; ++l) {
            const auto sym = word.entries[base + static_cast<std::size_t>(l)];
            if (word.is_star(j * block + l)) { decoded = false; break; }
            if (prev.is_star(l)) {
                const auto idx = fill.index_of(sym, tol);
                if (!idx) decoded = false;
                else tuple = tuple * g + static_cast<std::int64_t>(*idx);
            } else if (symbol_distance(sym, prev.entries[static_cast<std::size_t>(l)]) > tol) {
                decoded = false;
            }
        }
        if (!decoded || tuple >= rep.census_expected) {
            rep.violations.push_back("tail block " + std::to_string(j) + " is not a filled level-" +
                                     std::to_string(k - 1) + " skeleton");
            continue;
        }
        if (seen[static_cast<std::size_t>(tuple)]++ == 0) ++rep.census_distinct;
        else rep.violations.push_back("filling " + std::to_string(tuple) + " repeated");
    }
    rep.census_bijective = rep.census_distinct == rep.census_expected && word.tail_count == rep.census_expected;
    if (!rep.census_bijective && rep.violations.empty()) rep.violations.push_back("tail census incomplete");

    // Recurrence of each filled block in the segment.
    const auto len = static_cast<std::int64_t>(seg.entries.size());
    for (std::int64_t j = first_tail; j < word.multiplier; ++j) {
        const auto base = static_cast<std::size_t>(j * block);
        std::int64_t last = -1; // local start of the previous occurrence
        std::int64_t worst = 0;
        for (std::int64_t s = 0; s + block <= len; ++s) {
            bool hit = true;
            for (std::int64_t l = 0; l < block && hit; ++l)
                hit = symbol_distance(seg.entries[static_cast<std::size_t>(s + l)],
                                      word.entries[base + static_cast<std::size_t>(l)]) <= tol;
            if (!hit) continue;
            worst = std::max(worst, last < 0 ? s : s - last);
            last = s;
        }
        worst = std::max(worst, last < 0 ? len : len - last);
        rep.max_gap = std::max(rep.max_gap, worst);
        if (worst > rep.gap_bound)
            rep.violations.push_back("filled block " + std::to_string(j - first_tail) + " recurs with gap " +
                                     std::to_string(worst) + " > " + std::to_string(rep.gap_bound));
    }
    return rep;
}

struct MetricValue {
    double value = 0;
    /// Upper bound on what the truncation left out.
    double tail_bound = 0;
};

/// D1(x, y) = sum over n of d(x_n, y_n) / 2^|n|, truncated to |n| <= trunc.
inline MetricValue metric_D1(const SubshiftSegment& x, const SubshiftSegment& y, std::int64_t trunc) {
    if (!x.covers(-trunc, trunc) || !y.covers(-trunc, trunc))
        throw Error("symbolic", ErrorCode::CoverageError, "segments do not cover [-N, N]");
    double sum = 0;
    for (std::int64_t n = -trunc; n <= trunc; ++n)
        sum += symbol_distance(x.at(n), y.at(n)) * std::ldexp(1.0, -static_cast<int>(std::llabs(n)));
    return {sum, std::ldexp(1.0, static_cast<int>(-trunc + 1))};
}

} // namespace meandim
