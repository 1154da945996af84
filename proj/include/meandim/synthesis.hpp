#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "meandim/error.hpp"
#include "meandim/kernel.hpp"
#include "meandim/skew.hpp"
#include "meandim/symbolic.hpp"

namespace meandim {

using Complex = std::complex<double>;

/// Anything that can be sampled, knows how far its evaluation may be off from
/// the infinite expansion it truncates, and knows its highest frequency.
template <class S>
concept Signal = requires(const S& s, double x) {
    { s.eval(x) } -> std::convertible_to<Complex>;
    { s.truncation_bound(x) } -> std::convertible_to<double>;
    { s.max_frequency() } -> std::convertible_to<double>;
};

/// Largest |re + i im| for re, im in [0, 1].
inline constexpr double kSymbolModulusBound = std::numbers::sqrt2;

/// Default half-width of the coefficient window, in symbols.
inline constexpr std::int64_t kDefaultWindowRadius = 200;

enum class ExpSign { Positive, Negative };

/// amplitude * exp(sign * 2 pi i c (x + i)).
struct PhaseTerm {
    double amplitude = 1;
    double c = 0;
    std::int64_t i = 0;
    ExpSign sign = ExpSign::Positive;

    Complex eval(double x) const {
        const double turns = c * (x + static_cast<double>(i));
        const double frac = turns - std::round(turns);
        const double ang = (sign == ExpSign::Positive ? 2.0 : -2.0) * std::numbers::pi * frac;
        return {amplitude * std::cos(ang), amplitude * std::sin(ang)};
    }
    double line_frequency() const { return sign == ExpSign::Positive ? c : -c; }
};

/// H(i)(x) = exp(-+ 2 pi i c (x + i)); ExpSign::Positive puts the spectral
/// line at +c.
inline PhaseTerm phase_H(std::int64_t i, double c, ExpSign sign = ExpSign::Positive) {
    return PhaseTerm{1.0, c, i, sign};
}

/// Truncated lattice expansion
///   g(x) = scale / norm_C * sum_m coeff_m f(x + time_offset - (u/v) m + phase_i)
///          + extra(x + extra_offset).
/// m runs over the node window [node_min, node_min + coeffs.size()).
class BandSignal {
public:
    InterpolationKernel kernel;
    std::vector<Complex> coeffs;
    std::int64_t node_min = 0;
    /// Symbol window [n_min, n_max]; nodes per symbol = kernel.v.
    std::int64_t n_min = 0, n_max = -1;
    std::int64_t phase_i = 0;
    /// Z_p coordinate carried alongside the function.
    std::int64_t counter = 0;
    std::int64_t p = 1;
    double norm_C = 1;
    double scale = 1;
    double coeff_bound = kSymbolModulusBound;
    double time_offset = 0;
    std::optional<PhaseTerm> extra;
    double extra_offset = 0;

    std::int64_t node_max() const { return node_min + static_cast<std::int64_t>(coeffs.size()) - 1; }

    Complex eval(double x) const {
        const double y = x + time_offset + static_cast<double>(phase_i);
        const double h = kernel.spacing();
        Complex acc{0, 0};
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k] == Complex{0, 0}) continue;
            const double node = h * static_cast<double>(node_min + static_cast<std::int64_t>(k));
            acc += coeffs[k] * eval_kernel(kernel, y - node);
        }
        acc *= scale / norm_C;
        if (extra) acc += extra->eval(x + extra_offset);
        return acc;
    }

    /// Bound on |g_infinite(x) - g(x)| from every node outside the window,
    /// using |coeff| <= coeff_bound and |f(t)| <= C1 / (1 + t^2).
    double truncation_bound(double x) const {
        const double y = x + time_offset + static_cast<double>(phase_i);
        const double h = kernel.spacing();
        const double everything = 2 + std::numbers::pi / h;
        auto side = [&](double t1) {
            if (!(t1 > 0)) return everything;
            return 1 / (1 + t1 * t1) + (std::numbers::pi / 2 - std::atan(t1)) / h;
        };
        const double right = side(h * static_cast<double>(node_max() + 1) - y);
        const double left = side(y - h * static_cast<double>(node_min - 1));
        return scale * coeff_bound * kernel.C1 / norm_C * std::min(everything, right + left);
    }

    double max_frequency() const {
        double f = kernel.max_frequency();
        if (extra) f = std::max(f, std::fabs(extra->c));
        return f;
    }
};

/// F((a_n), i): coefficient of node m = n q + j is a_n^{j,1} + i a_n^{j,2}
/// for |n| <= radius.
inline BandSignal synth_F(const SkewPoint& pt, const InterpolationKernel& kernel, double norm_C,
                          std::int64_t radius = kDefaultWindowRadius) {
    const std::int64_t q = kernel.v;
    if (pt.segment.entries.dim() != static_cast<std::size_t>(2 * q))
        throw Error("synthesis", ErrorCode::WindowMismatch, "symbol dimension does not match 2q");
    if (!pt.segment.covers(-radius, radius))
        throw Error("synthesis", ErrorCode::WindowMismatch,
                    "segment does not cover symbol window [-" + std::to_string(radius) + ", " + std::to_string(radius) + "]");
    BandSignal g;
    g.kernel = kernel;
    g.p = kernel.u;
    g.phase_i = pt.i;
    g.counter = pt.i;
    g.norm_C = norm_C;
    g.n_min = -radius;
    g.n_max = radius;
    g.node_min = -radius * q;
    g.coeffs.reserve(static_cast<std::size_t>((2 * radius + 1) * q));
    for (std::int64_t n = -radius; n <= radius; ++n) {
        const auto sym = pt.segment.at(n);
        for (std::int64_t j = 0; j < q; ++j)
            g.coeffs.emplace_back(sym[static_cast<std::size_t>(2 * j)], sym[static_cast<std::size_t>(2 * j + 1)]);
    }
    return g;
}

/// Normalisation that keeps F-images in the unit ball for complex symbol
/// values: the lattice sup C scaled by the largest coefficient modulus.
inline double synthesis_norm(const InterpolationKernel& kernel, double grid_step = 1e-3) {
    return kSymbolModulusBound * normalization_C(kernel, grid_step);
}

/// G(g, i) = (g + H(i)) / 2.
inline BandSignal apply_G(BandSignal g, std::int64_t i, double c, ExpSign sign = ExpSign::Positive) {
    if (g.extra) throw Error("synthesis", ErrorCode::InvalidArgument, "signal already carries a phase term");
    if (g.counter != i) throw Error("synthesis", ErrorCode::InvalidArgument, "G needs the signal's own Z_p coordinate");
    g.scale /= 2;
    PhaseTerm h = phase_H(i, c, sign);
    h.amplitude = 0.5;
    g.extra = h;
    g.extra_offset = 0;
    return g;
}

/// T(g, i) = (g(. + 1), i + 1 mod p).
inline BandSignal skew_T(BandSignal g) {
    if (g.extra) throw Error("synthesis", ErrorCode::InvalidArgument, "T acts on F-images only");
    g.time_offset += 1;
    g.counter = (g.counter + 1) % g.p;
    return g;
}

/// sigma^t: g(.) -> g(. + t) on the whole signal.
inline BandSignal time_shift(BandSignal g, double t) {
    g.time_offset += t;
    g.extra_offset += t;
    return g;
}

struct RecoveredCoeff {
    std::int64_t n = 0;
    std::int64_t j = 0;
    Complex value;
    double error_bound = 0;
};

/// a_m^{j} = norm_C * g((p/q)(m q + j) - i) for m in [n_lo, n_hi].
inline std::vector<RecoveredCoeff> recover_coeffs(const BandSignal& g, std::int64_t i, std::int64_t n_lo, std::int64_t n_hi) {
    if (g.extra || g.time_offset != 0 || g.scale != 1)
        throw Error("synthesis", ErrorCode::InvalidArgument, "recovery needs an unmodified F-image");
    const std::int64_t q = g.kernel.v;
    const double h = g.kernel.spacing();
    std::vector<RecoveredCoeff> out;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        for (std::int64_t j = 0; j < q; ++j) {
            const double x = h * static_cast<double>(n * q + j) - static_cast<double>(i);
            out.push_back({n, j, g.norm_C * g.eval(x), g.norm_C * g.truncation_bound(x)});
        }
    }
    return out;
}

/// (g + conj(g)) / 2 = Re g.
template <Signal S>
struct Realified {
    S inner;

    Complex eval(double x) const { return {inner.eval(x).real(), 0.0}; }
    double truncation_bound(double x) const { return inner.truncation_bound(x); }
    double max_frequency() const { return inner.max_frequency(); }
};

template <Signal S>
Realified<S> realify(S s) { return Realified<S>{std::move(s)}; }

/// Closed-form test signal amplitude * exp(2 pi i freq x).
struct ToneSignal {
    Complex amplitude{1, 0};
    double freq = 0;

    Complex eval(double x) const {
        const double turns = freq * x;
        const double ang = 2 * std::numbers::pi * (turns - std::round(turns));
        return amplitude * Complex(std::cos(ang), std::sin(ang));
    }
    double truncation_bound(double) const { return 0; }
    double max_frequency() const { return std::fabs(freq); }
};

struct SampleSequence {
    std::int64_t first = 0;
    std::vector<double> raw;
    /// (raw + 1) / 2, in [0, 1] for signals in the unit ball.
    std::vector<double> rescaled;
};

inline double rescale_sample(double raw) { return (raw + 1) / 2; }
inline double unscale_sample(double out) { return 2 * out - 1; }

/// f -> (f(n)) for n in [n_lo, n_hi], affinely mapped into [0, 1].
template <Signal S>
SampleSequence integer_sampling(const S& f, std::int64_t n_lo, std::int64_t n_hi) {
    SampleSequence seq;
    seq.first = n_lo;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const double v = f.eval(static_cast<double>(n)).real();
        if (std::fabs(v) > 1 + 1e-9)
            throw Error("synthesis", ErrorCode::InvalidArgument, "signal leaves the unit ball at n = " + std::to_string(n));
        seq.raw.push_back(v);
        seq.rescaled.push_back(rescale_sample(v));
    }
    return seq;
}

struct MetricDResult {
    double value = 0;
    double error_bound = 0;
};

/// D(g1, g2) = sum_{n >= 1} ||g1 - g2||_{L^inf[-n, n]} / 2^n. Sup norms are
/// grid estimates; the error bound adds the series tail (sup of a difference
/// of unit-ball signals is at most 2), the grid error from `lipschitz`
/// (default: Bernstein's inequality 2 pi f_max * 2), and the truncation bounds.
template <Signal A, Signal B>
MetricDResult metric_D(const A& g1, const B& g2, std::int64_t n_max, double grid_step,
                       std::optional<double> lipschitz = {}) {
    if (n_max < 1 || !(grid_step > 0)) throw Error("synthesis", ErrorCode::InvalidArgument, "bad metric_D arguments");
    const double lip = lipschitz.value_or(2 * std::numbers::pi * std::max(g1.max_frequency(), g2.max_frequency()) * 2);
    const auto per_unit = static_cast<std::int64_t>(std::ceil(1 / grid_step));
    const double dx = 1.0 / static_cast<double>(per_unit);
    // sup over [-n, n] grows by the two unit strips added at each n.
    double sup = 0, trunc = 0, value = 0;
    auto scan = [&](double lo) {
        for (std::int64_t k = 0; k <= per_unit; ++k) {
            const double x = lo + static_cast<double>(k) * dx;
            sup = std::max(sup, std::abs(g1.eval(x) - g2.eval(x)));
            trunc = std::max(trunc, g1.truncation_bound(x) + g2.truncation_bound(x));
        }
    };
    for (std::int64_t n = 1; n <= n_max; ++n) {
        scan(-static_cast<double>(n));
        scan(static_cast<double>(n - 1));
        value += std::ldexp(sup, -static_cast<int>(n));
    }
    const double tail = 2 * std::ldexp(1.0, -static_cast<int>(n_max));
    return {value, tail + lip * dx / 2 + trunc};
}

} // namespace meandim
