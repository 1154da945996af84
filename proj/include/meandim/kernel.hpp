#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>

#include "meandim/error.hpp"
#include "meandim/params.hpp"

namespace meandim {

/// sin(pi t) / (pi t) with sinc(0) = 1. The argument is reduced modulo 2
/// before the sine so integer zeros stay accurate for large |t|.
inline double sinc(double t) {
    if (t == 0.0) return 1.0;
    const double reduced = t - 2.0 * std::round(t / 2.0);
    return std::sin(std::numbers::pi * reduced) / (std::numbers::pi * t);
}

/// f(x) = sinc((v/u) x) * sinc(eps_sharp (v/u) x) * exp(2 pi i x0 x).
/// f(0) = 1, f((u/v) n) = 0 for n != 0, and f is band-limited in
/// [t1, t1 + (1 + eps_sharp) v/u].
struct InterpolationKernel {
    std::int64_t u = 1;
    std::int64_t v = 1;
    double t1 = 0;
    double t2 = 1;
    double eps_sharp = 1;
    double x0 = 0;
    double C1 = 1;

    double rate() const { return static_cast<double>(v) / static_cast<double>(u); }
    /// Node spacing u/v.
    double spacing() const { return static_cast<double>(u) / static_cast<double>(v); }
    double band_lo() const { return t1; }
    double band_hi() const { return t1 + (1 + eps_sharp) * rate(); }
    double max_frequency() const { return std::max(std::fabs(band_lo()), std::fabs(band_hi())); }
};

inline std::complex<double> eval_kernel(const InterpolationKernel& k, double x) {
    const double env = sinc(k.rate() * x) * sinc(k.eps_sharp * k.rate() * x);
    if (k.x0 == 0.0) return {env, 0.0};
    // x0 * x reduced modulo 1.
    const double turns = k.x0 * x;
    const double frac = turns - std::round(turns);
    const double ang = 2.0 * std::numbers::pi * frac;
    return {env * std::cos(ang), env * std::sin(ang)};
}

namespace detail {
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 80) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) { b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c); }
        else { a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d); }
    }
    return std::max({fc, fd, f(lo), f(hi)});
}
} // namespace detail

/// Smallest C1 found for |f(x)| <= C1 / (1 + x^2): grid sup of (1+x^2)|f(x)|
/// on [0, scan_radius] with local maxima refined, combined with the analytic
/// bound (1 + 1/R^2) / (pi^2 eps_sharp (v/u)^2) that holds for |x| >= R.
inline double decay_constant(const InterpolationKernel& k, double scan_radius = 200.0, double grid_step = 1e-3) {
    if (!(scan_radius > 0) || !(grid_step > 0))
        throw Error("kernel", ErrorCode::InvalidArgument, "scan_radius and grid_step must be positive");
    auto weighted = [&](double x) {
        const double env = sinc(k.rate() * x) * sinc(k.eps_sharp * k.rate() * x);
        return (1 + x * x) * std::fabs(env);
    };
    const auto steps = static_cast<std::int64_t>(std::ceil(scan_radius / grid_step));
    double best = weighted(0.0);
    double prev2 = weighted(0.0), prev1 = weighted(grid_step);
    for (std::int64_t i = 2; i <= steps + 1; ++i) {
        const double x = static_cast<double>(i) * grid_step;
        const double cur = weighted(x);
        if (prev1 >= prev2 && prev1 >= cur) {
            const double xm = x - grid_step;
            best = std::max(best, detail::golden_max(weighted, xm - grid_step, xm + grid_step));
        }
        prev2 = prev1;
        prev1 = cur;
    }
    const double a = 1.0 / (std::numbers::pi * std::numbers::pi * k.eps_sharp * k.rate() * k.rate());
    const double tail = a * (1 + 1 / (scan_radius * scan_radius));
    return std::max(best, tail) * (1 + 1e-12);
}

inline InterpolationKernel make_kernel(std::int64_t u, std::int64_t v, double t1, double t2, double eps_sharp,
                                       double scan_radius = 200.0, double grid_step = 1e-3) {
    if (u < 1 || v < 1) throw Error("kernel", ErrorCode::InvalidArgument, "u, v must be positive");
    if (!(eps_sharp > 0)) throw Error("kernel", ErrorCode::InvalidArgument, "eps_sharp must be positive");
    InterpolationKernel k;
    k.u = u;
    k.v = v;
    k.t1 = t1;
    k.t2 = t2;
    k.eps_sharp = eps_sharp;
    k.x0 = t1 + (1 + eps_sharp) * k.rate() / 2;
    if (k.band_hi() > t2 + 1e-12)
        throw Error("kernel", ErrorCode::BandOverflow,
                    "kernel band [" + format_decimal(k.band_lo()) + ", " + format_decimal(k.band_hi()) +
                        "] exceeds [" + format_decimal(t1) + ", " + format_decimal(t2) + "]");
    k.C1 = decay_constant(k, scan_radius, grid_step);
    return k;
}

/// Kernel for the construction: u = p, v = q, band [a + eps0, b]. Without an
/// explicit sharpness the parameters' own (p/q in strict mode) is used.
inline InterpolationKernel make_kernel(const ConstructionParams& prm, std::optional<double> eps_sharp = {}) {
    return make_kernel(prm.p, prm.q, prm.a + prm.eps0, prm.b, eps_sharp.value_or(prm.eps_sharp));
}

/// sup over x of sum over the node lattice (u/v)Z of C1 / (1 + (x - lambda)^2).
/// The sum is periodic, so one period is scanned; terms beyond `terms` nodes
/// on either side are replaced by their integral bound.
inline double normalization_C(const InterpolationKernel& k, double grid_step = 1e-3, std::int64_t terms = 4000) {
    if (!(grid_step > 0)) throw Error("kernel", ErrorCode::InvalidArgument, "grid_step must be positive");
    const double h = k.spacing();
    auto partial = [&](double x) {
        double s = 0;
        for (std::int64_t m = -terms; m <= terms; ++m) {
            const double t = x - h * static_cast<double>(m);
            s += 1 / (1 + t * t);
        }
        return s;
    };
    const double right = h * static_cast<double>(terms);     // x < h, m > terms
    const double left = h * static_cast<double>(terms + 1); // x >= 0, m < -terms
    const double tail = 1 / (1 + right * right) + (std::numbers::pi / 2 - std::atan(right)) / h +
                        1 / (1 + left * left) + (std::numbers::pi / 2 - std::atan(left)) / h;
    const auto steps = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(h / grid_step)));
    const double dx = h / static_cast<double>(steps);
    double best = -1, best_x = 0;
    for (std::int64_t i = 0; i < steps; ++i) {
        const double x = static_cast<double>(i) * dx;
        const double v = partial(x);
        if (v > best) { best = v; best_x = x; }
    }
    best = std::max(best, detail::golden_max(partial, best_x - dx, best_x + dx, 60));
    return k.C1 * (best + tail);
}

} // namespace meandim
