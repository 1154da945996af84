#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <limits>
#include <mutex>
#include <numbers>
#include <string_view>
#include <vector>

#include "meandim/error.hpp"
#include "meandim/kernel.hpp"
#include "meandim/rational.hpp"
#include "meandim/rng.hpp"
#include "meandim/synthesis.hpp"

namespace meandim {

enum class WindowKind { Hann, Rectangular };

inline std::string_view to_string(WindowKind w) { return w == WindowKind::Hann ? "hann" : "rectangular"; }

/// Power spectrum of a windowed, sampled signal. Frequencies are in cycles
/// per unit time, ascending and symmetric about 0 with step 1/(2 radius).
/// Transform convention: X(xi) = sum y(x) exp(-2 pi i x xi), so a component
/// exp(+2 pi i c x) shows up at +c.
struct SpectrumEstimate {
    std::vector<double> freqs;
    std::vector<double> power;
    WindowKind window_kind = WindowKind::Hann;
    double window_radius = 0;
    double sample_step = 0;
    /// sum |w(x_n) g(x_n)|^2
    double windowed_energy = 0;
    /// sum w(x_n)^2; divides line power into mean power.
    double window_energy = 0;

    double total_power() const {
        double s = 0;
        for (double v : power) s += v;
        return s;
    }
    double bin_width() const { return 1 / (2 * window_radius); }
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline std::vector<std::complex<double>> forward_dft(std::vector<std::complex<double>> in) {
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.size());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}
} // namespace detail

/// Samples g at N (odd) points spanning [-radius, radius], applies the
/// window, and returns |X_k|^2 / N so the spectrum sums to the windowed energy.
template <Signal S>
SpectrumEstimate spectrum_estimate(const S& g, double radius, double sample_step, WindowKind kind = WindowKind::Hann) {
    if (!(radius > 0) || !(sample_step > 0)) throw Error("spectral", ErrorCode::InvalidArgument, "radius and step must be positive");
    const double fmax = g.max_frequency();
    if (!(sample_step * 2 * fmax < 1))
        throw Error("spectral", ErrorCode::NyquistViolation,
                    "step " + format_decimal(sample_step) + " does not resolve frequency " + format_decimal(fmax));
    auto half = static_cast<std::int64_t>(std::ceil(radius / sample_step));
    const std::int64_t n = 2 * half + 1;
    const double dx = 2 * radius / static_cast<double>(n);

    SpectrumEstimate est;
    est.window_kind = kind;
    est.window_radius = radius;
    est.sample_step = dx;
    std::vector<std::complex<double>> y(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k - half) * dx;
        const double w = kind == WindowKind::Hann ? 0.5 * (1 + std::cos(std::numbers::pi * x / radius)) : 1.0;
        y[static_cast<std::size_t>(k)] = w * g.eval(x);
        est.windowed_energy += std::norm(y[static_cast<std::size_t>(k)]);
        est.window_energy += w * w;
    }
    const auto spec = detail::forward_dft(std::move(y));
    est.freqs.resize(static_cast<std::size_t>(n));
    est.power.resize(static_cast<std::size_t>(n));
    const double df = 1 / (static_cast<double>(n) * dx);
    for (std::int64_t k = -half; k <= half; ++k) {
        const auto src = static_cast<std::size_t>(k >= 0 ? k : k + n);
        const auto dst = static_cast<std::size_t>(k + half);
        est.freqs[dst] = static_cast<double>(k) * df;
        est.power[dst] = std::norm(spec[src]) / static_cast<double>(n);
    }
    return est;
}

/// |sum power - windowed energy| / windowed energy (0 for a zero signal).
inline double parseval_error(const SpectrumEstimate& est) {
    if (est.windowed_energy == 0) return est.total_power() == 0 ? 0 : 1;
    return std::fabs(est.total_power() - est.windowed_energy) / est.windowed_energy;
}

/// Fraction of power inside [lo - guard, hi + guard]; 1 for a zero spectrum.
inline double band_energy_ratio(const SpectrumEstimate& est, double lo, double hi, double guard) {
    const double total = est.total_power();
    if (total == 0) return 1;
    double inside = 0;
    for (std::size_t k = 0; k < est.freqs.size(); ++k)
        if (est.freqs[k] >= lo - guard && est.freqs[k] <= hi + guard) inside += est.power[k];
    return inside / total;
}

/// Frequency of the strongest bin inside [lo, hi].
inline double peak_frequency(const SpectrumEstimate& est, double lo, double hi) {
    double best = -1, where = 0;
    for (std::size_t k = 0; k < est.freqs.size(); ++k)
        if (est.freqs[k] >= lo && est.freqs[k] <= hi && est.power[k] > best) { best = est.power[k]; where = est.freqs[k]; }
    return where;
}

/// Mean power of a spectral line: power within `bins` bins of `freq`
/// divided by the window energy. A tone A exp(2 pi i c x) gives about |A|^2.
inline double line_power(const SpectrumEstimate& est, double freq, int bins = 3) {
    const double tol = (bins + 0.5) * est.bin_width();
    double s = 0;
    for (std::size_t k = 0; k < est.freqs.size(); ++k)
        if (std::fabs(est.freqs[k] - freq) <= tol) s += est.power[k];
    return est.window_energy > 0 ? s / est.window_energy : 0;
}

/// max |P(xi) - P(-xi)| relative to the largest bin.
inline double symmetry_error(const SpectrumEstimate& est) {
    const std::size_t n = est.power.size();
    double peak = 0, worst = 0;
    for (double v : est.power) peak = std::max(peak, v);
    if (peak == 0) return 0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::fabs(est.power[k] - est.power[n - 1 - k]));
    return worst / peak;
}

struct SamplingEvidence {
    double half_band = 0;
    double step = 0;
    std::int64_t trials = 0;
    std::int64_t separated = 0;
    std::int64_t violations = 0;
    /// smallest observed max |f1(dn) - f2(dn)| over all pairs
    double min_separation = 0;
    std::int64_t nodes_per_sample = 0;

    bool pass() const { return violations == 0; }
};

/// Real interpolation kernel band-limited in [-half_band, half_band] whose
/// nodes sit on the sampling grid dZ: spacing h = j d with the least j such
/// that 2 half_band h > 1.
inline InterpolationKernel sampling_kernel(double half_band, double step) {
    const Rational d = Rational::approximate(step, 1'000'000, 1e-12);
    const std::int64_t j = static_cast<std::int64_t>(std::floor(1 / (2 * half_band * step))) + 1;
    const Rational h = Rational(j) * d;
    const double width = 2 * half_band * h.to_double() - 1; // > 0 by choice of j
    const double sharp = std::min(0.5, width);
    const double t1 = -(1 + sharp) / (2 * h.to_double());
    InterpolationKernel k = make_kernel(h.num(), h.den(), t1, half_band, sharp);
    k.x0 = 0; // symmetric band: the kernel is real
    return k;
}

/// Pairs of distinct real signals band-limited in [-a', a'] must differ at
/// some sample dn when 2 a' d < 1. Each signal is a finite expansion with
/// real coefficients in [0, 1]; half of the pairs differ in a single node.
inline SamplingEvidence sampling_injectivity_check(double half_band, double step, std::int64_t trials, std::uint64_t seed,
                                                   std::int64_t nodes = 40) {
    if (!(half_band > 0) || !(step > 0)) throw Error("spectral", ErrorCode::InvalidArgument, "need positive a' and d");
    if (!(2 * half_band * step < 1))
        throw Error("spectral", ErrorCode::HypothesisViolation,
                    "2 a' d = " + format_decimal(2 * half_band * step) + " >= 1; sampling need not be injective");
    const InterpolationKernel k = sampling_kernel(half_band, step);
    const double norm = normalization_C(k);
    const auto per_node = static_cast<std::int64_t>(std::llround(k.spacing() / step));
    SamplingEvidence ev;
    ev.half_band = half_band;
    ev.step = step;
    ev.trials = trials;
    ev.nodes_per_sample = per_node;
    ev.min_separation = std::numeric_limits<double>::infinity();
    Stream rng(seed);
    auto make = [&](const std::vector<Complex>& c) {
        BandSignal g;
        g.kernel = k;
        g.coeffs = c;
        g.node_min = -nodes;
        g.norm_C = norm;
        g.coeff_bound = 1;
        return g;
    };
    for (std::int64_t t = 0; t < trials; ++t) {
        std::vector<Complex> c1(static_cast<std::size_t>(2 * nodes + 1)), c2;
        for (auto& v : c1) v = rng.uniform();
        c2 = c1;
        double coeff_gap = 0;
        if (t % 2 == 0) {
            const auto idx = rng.below(c1.size());
            c2[idx] = rng.uniform();
            if (c2[idx] == c1[idx]) c2[idx] = 1 - c1[idx].real();
        } else {
            for (auto& v : c2) v = rng.uniform();
        }
        for (std::size_t m = 0; m < c1.size(); ++m) coeff_gap = std::max(coeff_gap, std::abs(c1[m] - c2[m]));
        const BandSignal f1 = make(c1), f2 = make(c2);
        double sep = 0;
        const std::int64_t reach = (nodes + 4) * per_node;
        for (std::int64_t n = -reach; n <= reach; ++n) {
            const double x = static_cast<double>(n) * step;
            sep = std::max(sep, std::fabs(f1.eval(x).real() - f2.eval(x).real()));
        }
        ev.min_separation = std::min(ev.min_separation, sep);
        const double floor = coeff_gap / norm - 1e-12;
        if (sep > 0 && sep >= floor) ++ev.separated;
        else ++ev.violations;
    }
    if (trials == 0) ev.min_separation = 0;
    return ev;
}

} // namespace meandim
