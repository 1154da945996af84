#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "meandim/kernel.hpp"
#include "meandim/mdim.hpp"
#include "meandim/synthesis.hpp"
#include "support.hpp"

using namespace meandim;
using std::numbers::pi;

namespace {

struct Fixture {
    ConstructionParams prm = testing_support::worked_instance();
    Tower tower{prm, 2};
    InterpolationKernel kernel = make_kernel(prm);
    double norm = synthesis_norm(kernel);

    SkewPoint random_point(std::uint64_t seed, std::int64_t i, std::int64_t radius = 60) const {
        return SkewPoint{generate_segment(tower, 2, std::max<std::int64_t>(2 * radius + 9, 301), seed, FillMode::Random,
                                          -radius - 4),
                         i};
    }
    // Segment of all-zero symbols (not a point of Y, just a coefficient source).
    SkewPoint zero_point(std::int64_t radius = 60) const {
        SkewPoint pt;
        pt.segment.offset = radius + 4;
        pt.segment.entries = SymbolString(6, static_cast<std::size_t>(2 * radius + 9), 0.0);
        return pt;
    }
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

} // namespace

TEST(SynthF, ZeroCoefficientsGiveZero) {
    const auto& f = fx();
    SkewPoint pt = f.zero_point();
    const auto g = synth_F(pt, f.kernel, f.norm, 60);
    for (double x : {-3.0, 0.0, 0.7, 41.0}) EXPECT_EQ(g.eval(x), Complex(0, 0));
}

TEST(SynthF, SingleCoefficient) {
    const auto& f = fx();
    SkewPoint pt = f.zero_point();
    pt.segment.mutable_at(0)[0] = 1.0;
    const auto g = synth_F(pt, f.kernel, f.norm, 60);
    EXPECT_NEAR(std::abs(g.eval(0) - Complex(1 / f.norm, 0)), 0, 1e-15);
    for (double x : {0.3, -2.2, 9.0}) EXPECT_NEAR(std::abs(g.eval(x) - eval_kernel(f.kernel, x) / f.norm), 0, 1e-15);
}

TEST(SynthF, NormIncludesComplexModulus) {
    const auto& f = fx();
    EXPECT_NEAR(f.norm, std::sqrt(2.0) * normalization_C(f.kernel), 1e-15);
}

TEST(SynthF, UnitBallOnRandomPoints) {
    const auto& f = fx();
    Stream rng(1);
    for (int t = 0; t < 5; ++t) {
        const auto g = synth_F(f.random_point(rng.below(1000), static_cast<std::int64_t>(rng.below(5))), f.kernel, f.norm, 60);
        for (int s = 0; s < 400; ++s) EXPECT_LE(std::abs(g.eval(rng.uniform(-120, 120))), 1 + 1e-9);
    }
}

TEST(SynthF, WindowMismatch) {
    const auto& f = fx();
    EXPECT_THROW(synth_F(f.random_point(1, 0, 60), f.kernel, f.norm, 100), Error);
    const Tower other(testing_support::half_instance(), 1);
    SkewPoint q1{generate_segment(other, 1, 200, 1, FillMode::Random, -100), 0};
    EXPECT_THROW(synth_F(q1, f.kernel, f.norm, 60), Error);
}

TEST(RecoverCoeffs, RoundTripWithinBound) {
    const auto& f = fx();
    for (std::int64_t i : {0, 3, 4}) {
        const auto pt = f.random_point(17 + static_cast<std::uint64_t>(i), i);
        const auto g = synth_F(pt, f.kernel, f.norm, 60);
        for (const auto& rc : recover_coeffs(g, i, -60, 60)) {
            const auto sym = pt.segment.at(rc.n);
            const Complex truth(sym[static_cast<std::size_t>(2 * rc.j)], sym[static_cast<std::size_t>(2 * rc.j + 1)]);
            EXPECT_LE(std::abs(rc.value - truth), rc.error_bound);
            EXPECT_LT(std::abs(rc.value - truth), 1e-3);
        }
    }
}

TEST(RecoverCoeffs, OneCoefficientChangeIsSeen) {
    const auto& f = fx();
    const auto a = f.random_point(3, 0);
    auto b = a;
    b.segment.mutable_at(7)[3] = a.segment.at(7)[3] > 0.5 ? 0.0 : 1.0;
    const double delta = std::fabs(a.segment.at(7)[3] - b.segment.at(7)[3]);
    const auto ga = synth_F(a, f.kernel, f.norm, 60), gb = synth_F(b, f.kernel, f.norm, 60);
    const double x = f.kernel.spacing() * (7 * 3 + 1);
    const double diff = std::abs(ga.eval(x) - gb.eval(x));
    EXPECT_GE(diff, delta / f.norm - 1e-12);
}

TEST(RecoverCoeffs, RequiresPlainImage) {
    const auto& f = fx();
    const auto g = synth_F(f.random_point(3, 0), f.kernel, f.norm, 60);
    EXPECT_THROW(recover_coeffs(apply_G(g, 0, f.prm.c), 0, 0, 1), Error);
}

TEST(TruncationBound, DominatesWindowDifference) {
    const auto& f = fx();
    const auto pt = f.random_point(99, 1, 120);
    const auto wide = synth_F(pt, f.kernel, f.norm, 120);
    const auto narrow = synth_F(pt, f.kernel, f.norm, 30);
    Stream rng(4);
    for (int t = 0; t < 300; ++t) {
        const double x = rng.uniform(-150, 150);
        EXPECT_LE(std::abs(wide.eval(x) - narrow.eval(x)), narrow.truncation_bound(x) + 1e-12);
    }
}

TEST(PhaseH, Values) {
    const auto h0 = phase_H(0, 0.2);
    EXPECT_NEAR(std::abs(h0.eval(0) - Complex(1, 0)), 0, 1e-15);
    Stream rng(2);
    for (int t = 0; t < 100; ++t) EXPECT_NEAR(std::abs(phase_H(3, 0.2).eval(rng.uniform(-50, 50))), 1, 1e-14);
    const auto neg = phase_H(1, 0.2, ExpSign::Negative);
    EXPECT_NEAR(std::abs(neg.eval(0.3) - std::exp(Complex(0, -2 * pi * 0.2 * 1.3))), 0, 1e-14);
    EXPECT_EQ(neg.line_frequency(), -0.2);
    // Different counters stay a constant distance apart.
    for (std::int64_t i1 = 0; i1 < 5; ++i1)
        for (std::int64_t i2 = 0; i2 < 5; ++i2) {
            if (i1 == i2) continue;
            const double expect = std::abs(Complex(1, 0) - std::exp(Complex(0, 2 * pi * 0.2 * static_cast<double>(i2 - i1))));
            for (double x : {-3.1, 0.0, 12.5})
                EXPECT_NEAR(std::abs(phase_H(i1, 0.2).eval(x) - phase_H(i2, 0.2).eval(x)), expect, 1e-13);
            EXPECT_GT(expect, 0.1);
        }
}

TEST(ApplyG, ZeroSignalGivesHalfPhase) {
    const auto& f = fx();
    SkewPoint pt = f.zero_point();
    const auto g = apply_G(synth_F(pt, f.kernel, f.norm, 60), 0, f.prm.c);
    for (double x : {-7.0, 0.0, 2.5}) EXPECT_NEAR(std::abs(g.eval(x)), 0.5, 1e-15);
}

TEST(ApplyG, NodeValueAndLinearity) {
    const auto& f = fx();
    const std::int64_t i = 2;
    const auto pt = f.random_point(5, i);
    const auto g = synth_F(pt, f.kernel, f.norm, 60);
    const auto gg = apply_G(g, i, f.prm.c);
    for (std::int64_t m : {-3, 0, 11}) {
        for (std::int64_t j = 0; j < 3; ++j) {
            const double x = f.kernel.spacing() * static_cast<double>(m * 3 + j) - static_cast<double>(i);
            const auto sym = pt.segment.at(m);
            const Complex a(sym[static_cast<std::size_t>(2 * j)], sym[static_cast<std::size_t>(2 * j + 1)]);
            const Complex expect = a / (2 * f.norm) + phase_H(i, f.prm.c).eval(x) / 2.0;
            EXPECT_NEAR(std::abs(gg.eval(x) - expect), 0, 1e-12);
        }
    }
    const auto g2 = synth_F(f.random_point(6, i), f.kernel, f.norm, 60);
    const auto gg2 = apply_G(g2, i, f.prm.c);
    for (double x : {-4.4, 1.0, 30.0})
        EXPECT_NEAR(std::abs((gg.eval(x) - gg2.eval(x)) - (g.eval(x) - g2.eval(x)) / 2.0), 0, 1e-14);
    Stream rng(9);
    for (int t = 0; t < 500; ++t) EXPECT_LE(std::abs(gg.eval(rng.uniform(-100, 100))), 1 + 1e-9);
    EXPECT_THROW(apply_G(g, i + 1, f.prm.c), Error);
}

TEST(Equivariance, FSEqualsTF) {
    const auto& f = fx();
    Stream rng(12);
    const auto base = f.random_point(8, 0);
    for (int t = 0; t < 200; ++t) {
        SkewPoint pt{base.segment, static_cast<std::int64_t>(rng.below(5))};
        const auto lhs = synth_F(skew_S(pt, 5, 60), f.kernel, f.norm, 60);
        const auto rhs = skew_T(synth_F(pt, f.kernel, f.norm, 60));
        EXPECT_EQ(lhs.counter, rhs.counter);
        const double x = rng.uniform(-60, 60);
        EXPECT_LE(std::abs(lhs.eval(x) - rhs.eval(x)), lhs.truncation_bound(x) + rhs.truncation_bound(x) + 1e-12);
    }
}

TEST(Equivariance, GTEqualsSigmaG) {
    const auto& f = fx();
    Stream rng(13);
    for (int t = 0; t < 200; ++t) {
        const auto i = static_cast<std::int64_t>(rng.below(5));
        const auto g = synth_F(f.random_point(30, i), f.kernel, f.norm, 60);
        const auto tg = skew_T(g);
        const auto lhs = apply_G(tg, tg.counter, f.prm.c);
        const auto rhs = time_shift(apply_G(g, i, f.prm.c), 1.0);
        const double x = rng.uniform(-60, 60);
        EXPECT_LE(std::abs(lhs.eval(x) - rhs.eval(x)), 1e-12);
    }
}

TEST(Equivariance, SigmaGNeedsIntegralCp) {
    // With c p not an integer the wrap from i = p-1 to 0 breaks G T = sigma G.
    const auto& f = fx();
    const double c = 0.21;
    const auto g = synth_F(f.random_point(30, 4), f.kernel, f.norm, 60);
    const auto tg = skew_T(g);
    const auto lhs = apply_G(tg, tg.counter, c);
    const auto rhs = time_shift(apply_G(g, 4, c), 1.0);
    EXPECT_GT(std::abs(lhs.eval(0.3) - rhs.eval(0.3)), 1e-3);
}

TEST(Realify, RealPartAndTones) {
    const auto r = realify(ToneSignal{{1, 0}, 1.0});
    for (double x : {0.0, 0.1, 0.25, 1.7}) {
        EXPECT_NEAR(r.eval(x).real(), std::cos(2 * pi * x), 1e-14);
        EXPECT_EQ(r.eval(x).imag(), 0);
    }
    const auto& f = fx();
    const auto g = apply_G(synth_F(f.random_point(2, 0), f.kernel, f.norm, 60), 0, f.prm.c);
    const auto rg = realify(g);
    for (double x : {-5.0, 3.3}) {
        EXPECT_EQ(rg.eval(x).imag(), 0);
        EXPECT_EQ(rg.eval(x).real(), g.eval(x).real());
    }
    const auto rr = realify(realify(g));
    EXPECT_EQ(rr.eval(1.2), rg.eval(1.2));
}

TEST(Realify, DistinctInputsStayDistinct) {
    const auto& f = fx();
    Stream rng(44);
    for (int t = 0; t < 20; ++t) {
        const auto g1 = realify(apply_G(synth_F(f.random_point(rng.below(1000), 0), f.kernel, f.norm, 60), 0, f.prm.c));
        const auto g2 = realify(apply_G(synth_F(f.random_point(rng.below(1000), 0), f.kernel, f.norm, 60), 0, f.prm.c));
        double sep = 0;
        for (int s = 0; s < 200; ++s) {
            const double x = -50 + s * 0.5;
            sep = std::max(sep, std::fabs(g1.eval(x).real() - g2.eval(x).real()));
        }
        EXPECT_GT(sep, 1e-6);
    }
}

TEST(IntegerSampling, RescaleConvention) {
    const ToneSignal zero{{0, 0}, 0.1};
    const auto seq = integer_sampling(realify(zero), -5, 5);
    EXPECT_EQ(seq.raw.size(), 11u);
    for (double v : seq.rescaled) EXPECT_EQ(v, 0.5);
    Stream rng(1);
    for (int t = 0; t < 100; ++t) {
        const double raw = rng.uniform(-1, 1);
        EXPECT_EQ(unscale_sample(rescale_sample(raw)), raw);
    }
    EXPECT_THROW(integer_sampling(ToneSignal{{2, 0}, 0.1}, 0, 3), Error);
}

TEST(MetricD, Examples) {
    const ToneSignal a{{0.3, 0}, 0}, b{{0.1, 0}, 0};
    const auto same = metric_D(a, a, 20, 0.05);
    EXPECT_EQ(same.value, 0);
    const auto d = metric_D(a, b, 30, 0.05);
    EXPECT_NEAR(d.value, 0.2, 2 * std::ldexp(1.0, -30) + 1e-15);
    EXPECT_LE(std::fabs(d.value - 0.2), d.error_bound);
}

TEST(MetricD, EquivarianceInMetricForm) {
    const auto& f = fx();
    const auto pt = f.random_point(71, 4);
    const auto lhs = synth_F(skew_S(pt, 5, 60), f.kernel, f.norm, 60);
    const auto rhs = skew_T(synth_F(pt, f.kernel, f.norm, 60));
    const auto d = metric_D(lhs, rhs, 12, 0.05);
    EXPECT_LE(d.value, d.error_bound);
}
