#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "meandim/error.hpp"

namespace meandim {

/// Exact rational with 64-bit numerator/denominator, always reduced and with
/// a positive denominator. Intermediate products use 128-bit integers and
/// any result that no longer fits throws SizeOverflow.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit from integer
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Best rational approximation (continued fractions) with denominator at
    /// most `max_den`. Throws InvalidArgument when no such approximation is
    /// within `tol` of `x`.
    static Rational approximate(double x, std::int64_t max_den = 1'000'000'000, double tol = 1e-12) {
        if (!std::isfinite(x)) throw Error("rational", ErrorCode::InvalidArgument, "non-finite value");
        const bool neg = x < 0;
        double v = std::fabs(x);
        // Convergents h/k.
        __int128 h0 = 0, h1 = 1, k0 = 1, k1 = 0;
        double frac = v;
        for (int iter = 0; iter < 64; ++iter) {
            const double a = std::floor(frac);
            const auto ai = static_cast<__int128>(a);
            const __int128 h2 = ai * h1 + h0;
            const __int128 k2 = ai * k1 + k0;
            if (k2 > max_den || h2 > INT64_MAX) break;
            h0 = h1; h1 = h2; k0 = k1; k1 = k2;
            const double approx = static_cast<double>(h1) / static_cast<double>(k1);
            if (std::fabs(approx - v) <= 1e-15 * std::max(1.0, v)) break;
            const double rest = frac - a;
            if (rest <= 0) break;
            frac = 1.0 / rest;
        }
        if (k1 == 0) throw Error("rational", ErrorCode::InvalidArgument, "cannot approximate value");
        Rational r(static_cast<std::int64_t>(neg ? -h1 : h1), static_cast<std::int64_t>(k1));
        if (std::fabs(r.to_double() - x) > tol * std::max(1.0, std::fabs(x)))
            throw Error("rational", ErrorCode::InvalidArgument,
                        "value " + std::to_string(x) + " has no rational form with small denominator");
        return r;
    }

    /// floor(num/den) as an integer.
    std::int64_t floor() const noexcept {
        std::int64_t q = num_ / den_;
        if ((num_ % den_ != 0) && (num_ < 0)) --q;
        return q;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                         static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw Error("rational", ErrorCode::InvalidArgument, "division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void assign(__int128 n, __int128 d) {
        if (d == 0) throw Error("rational", ErrorCode::InvalidArgument, "zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) { const __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX)
            throw Error("rational", ErrorCode::SizeOverflow, "rational out of 64-bit range");
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
    }
    static Rational from_wide(__int128 n, __int128 d) {
        Rational r;
        r.assign(n, d);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace meandim
