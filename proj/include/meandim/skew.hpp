#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "meandim/error.hpp"
#include "meandim/symbolic.hpp"

namespace meandim {

/// Point (y, i) of Y x Z_p, with y known on a finite window.
struct SkewPoint {
    SubshiftSegment segment;
    std::int64_t i = 0;
};

/// S(y, i) = (y, i+1) for i < p-1 and (sigma y, 0) for i = p-1. The shift is
/// index bookkeeping: sigma moves coordinate 0 one entry to the right. When
/// `radius` > 0 the shifted window must still cover [-radius, radius].
inline SkewPoint skew_S(SkewPoint pt, std::int64_t p, std::int64_t radius = 0) {
    if (pt.i < 0 || pt.i >= p) throw Error("synthesis", ErrorCode::InvalidArgument, "counter outside Z_p");
    if (pt.i + 1 < p) {
        ++pt.i;
        return pt;
    }
    pt.i = 0;
    ++pt.segment.offset;
    if (radius > 0 && !pt.segment.covers(-radius, radius))
        throw Error("synthesis", ErrorCode::WindowExhausted, "shifted segment no longer covers the window");
    return pt;
}

inline SkewPoint skew_S_inverse(SkewPoint pt, std::int64_t p, std::int64_t radius = 0) {
    if (pt.i < 0 || pt.i >= p) throw Error("synthesis", ErrorCode::InvalidArgument, "counter outside Z_p");
    if (pt.i > 0) {
        --pt.i;
        return pt;
    }
    pt.i = p - 1;
    --pt.segment.offset;
    if (radius > 0 && !pt.segment.covers(-radius, radius))
        throw Error("synthesis", ErrorCode::WindowExhausted, "shifted segment no longer covers the window");
    return pt;
}

/// rho((x,i),(y,j)) = D1(x,y) if i = j, else 2.
inline MetricValue metric_rho(const SkewPoint& x, const SkewPoint& y, std::int64_t trunc) {
    if (x.i != y.i) return {2.0, 0.0};
    return metric_D1(x.segment, y.segment, trunc);
}

/// max over 0 <= l < n of rho(S^l x, S^l y). S^l(y, i) = (sigma^{(i+l) div p} y,
/// (i+l) mod p), so only the distinct shifts (i+l) div p need evaluating.
inline MetricValue metric_rho_n(const SkewPoint& x, const SkewPoint& y, std::int64_t n, std::int64_t p,
                                std::int64_t trunc) {
    if (n < 1) throw Error("symbolic", ErrorCode::InvalidArgument, "rho_n needs n >= 1");
    if (x.i != y.i) return {2.0, 0.0};
    const std::int64_t first = x.i / p;
    const std::int64_t last = (x.i + n - 1) / p;
    const std::int64_t lo = first - trunc, hi = last + trunc;
    if (!x.segment.covers(lo, hi) || !y.segment.covers(lo, hi))
        throw Error("symbolic", ErrorCode::CoverageError,
                    "segments must cover [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    std::vector<double> dist(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t c = lo; c <= hi; ++c)
        dist[static_cast<std::size_t>(c - lo)] = symbol_distance(x.segment.at(c), y.segment.at(c));
    std::vector<double> weight(static_cast<std::size_t>(trunc + 1));
    for (std::int64_t k = 0; k <= trunc; ++k) weight[static_cast<std::size_t>(k)] = std::ldexp(1.0, -static_cast<int>(k));
    double best = 0;
    for (std::int64_t shift = first; shift <= last; ++shift) {
        double sum = 0;
        for (std::int64_t k = -trunc; k <= trunc; ++k)
            sum += dist[static_cast<std::size_t>(shift + k - lo)] * weight[static_cast<std::size_t>(std::llabs(k))];
        best = std::max(best, sum);
    }
    return {best, std::ldexp(1.0, static_cast<int>(-trunc + 1))};
}

} // namespace meandim
