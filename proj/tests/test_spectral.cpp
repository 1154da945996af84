#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "meandim/spectral.hpp"
#include "support.hpp"

using namespace meandim;

namespace {

BandSignal worked_F(std::uint64_t seed) {
    static const auto prm = testing_support::worked_instance();
    static const Tower tower(prm, 2);
    static const auto kernel = make_kernel(prm);
    static const double norm = synthesis_norm(kernel);
    SkewPoint pt{generate_segment(tower, 2, 409, seed, FillMode::Random, -204), 0};
    return synth_F(pt, kernel, norm, 200);
}

} // namespace

TEST(Spectrum, ToneHasOneDominantBin) {
    const ToneSignal tone{{1, 0}, 0.2};
    const double radius = 64 / 0.2;
    const auto est = spectrum_estimate(tone, radius, 0.5);
    const double peak = peak_frequency(est, -2, 2);
    EXPECT_NEAR(peak, 0.2, est.bin_width() / 2);
    EXPECT_NEAR(line_power(est, 0.2), 1.0, 1e-3);
    EXPECT_GE(band_energy_ratio(est, 0.2, 0.2, est.bin_width()), 0.99);
    EXPECT_LE(band_energy_ratio(est, 0.5, 0.9, est.bin_width()), 0.01);
    EXPECT_LT(parseval_error(est), 1e-9);
    EXPECT_NEAR(est.bin_width(), 1 / (2 * radius), 1e-15);
}

TEST(Spectrum, FrequencyGridIsSymmetric) {
    const auto est = spectrum_estimate(ToneSignal{{1, 0}, 0.3}, 50, 0.4);
    const std::size_t n = est.freqs.size();
    EXPECT_EQ(n % 2, 1u);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(est.freqs[k], -est.freqs[n - 1 - k], 1e-12);
    for (std::size_t k = 1; k < n; ++k) EXPECT_NEAR(est.freqs[k] - est.freqs[k - 1], est.bin_width(), 1e-12);
}

TEST(Spectrum, ZeroSignal) {
    const auto est = spectrum_estimate(ToneSignal{{0, 0}, 0.3}, 20, 0.5);
    EXPECT_EQ(est.total_power(), 0);
    EXPECT_EQ(band_energy_ratio(est, 0, 1, 0), 1);
    EXPECT_EQ(parseval_error(est), 0);
}

TEST(Spectrum, RealSignalIsSymmetric) {
    const auto est = spectrum_estimate(realify(ToneSignal{{0.7, 0.2}, 0.35}), 100, 0.4);
    EXPECT_LT(symmetry_error(est), 1e-12);
    EXPECT_NEAR(line_power(est, 0.35), line_power(est, -0.35), 1e-12);
}

TEST(Spectrum, NyquistIsEnforced) {
    try {
        spectrum_estimate(ToneSignal{{1, 0}, 2.0}, 10, 0.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NyquistViolation);
    }
}

TEST(Spectrum, RectangularWindowLeaksMore) {
    const ToneSignal tone{{1, 0}, 0.2037};
    const auto hann = spectrum_estimate(tone, 100, 0.5, WindowKind::Hann);
    const auto rect = spectrum_estimate(tone, 100, 0.5, WindowKind::Rectangular);
    const double g = hann.bin_width();
    EXPECT_GT(band_energy_ratio(hann, 0.2037, 0.2037, 3 * g), band_energy_ratio(rect, 0.2037, 0.2037, 3 * g));
}

TEST(BandCheck, FImageConcentratesInBand) {
    const auto g = worked_F(4);
    const auto est = spectrum_estimate(g, 320, 0.19);
    EXPECT_GE(band_energy_ratio(est, 0.5, 3, est.bin_width()), 0.99);
    // The kernel band is [0.5, 2.1]; nothing substantial above it.
    EXPECT_GE(band_energy_ratio(est, 0.5, 2.1, est.bin_width()), 0.99);
    EXPECT_LE(band_energy_ratio(est, -3, 0.3, 0), 0.01);
    EXPECT_LT(parseval_error(est), 1e-9);
}

TEST(BandCheck, GImageLineAtModulation) {
    const auto g = apply_G(worked_F(5), 0, 0.2);
    const auto est = spectrum_estimate(g, 320, 0.19);
    EXPECT_GE(band_energy_ratio(est, 0, 3, est.bin_width()), 0.99);
    EXPECT_NEAR(peak_frequency(est, -3, 3), 0.2, 2 * est.bin_width());
    EXPECT_NEAR(line_power(est, 0.2), 0.25, 0.05);
    const auto neg = apply_G(worked_F(5), 0, 0.2, ExpSign::Negative);
    const auto en = spectrum_estimate(neg, 320, 0.19);
    EXPECT_NEAR(peak_frequency(en, -3, 3), -0.2, 2 * en.bin_width());
    EXPECT_LT(band_energy_ratio(en, 0, 3, en.bin_width()), 0.99);
}

TEST(Sampling, KernelSitsOnSamplingGrid) {
    const auto k = sampling_kernel(0.4, 1.0);
    EXPECT_EQ(k.spacing(), 2.0);
    EXPECT_EQ(k.x0, 0);
    EXPECT_LE(k.band_hi(), 0.4 + 1e-12);
    EXPECT_GE(k.band_lo(), -0.4 - 1e-12);
    EXPECT_NEAR(k.band_lo(), -k.band_hi(), 1e-15);
    for (int n = 1; n < 50; ++n) EXPECT_LT(std::abs(eval_kernel(k, 2.0 * n)), 1e-12);
    const auto k2 = sampling_kernel(0.3, 0.5);
    EXPECT_LE(k2.band_hi(), 0.3 + 1e-12);
    EXPECT_NEAR(std::fmod(k2.spacing(), 0.5), 0, 1e-12);
}

TEST(Sampling, InjectivityAndRefusal) {
    const auto ev = sampling_injectivity_check(0.4, 1.0, 100, 1);
    EXPECT_TRUE(ev.pass());
    EXPECT_EQ(ev.separated, 100);
    EXPECT_GT(ev.min_separation, 0);
    try {
        sampling_injectivity_check(0.6, 1.0, 10, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolation);
        EXPECT_EQ(e.qualified(), "spectral.HypothesisViolation");
    }
    EXPECT_THROW(sampling_injectivity_check(0.5, 1.0, 1, 1), Error);
}

TEST(Sampling, IdenticalSignalsAreNotSeparated) {
    const auto k = sampling_kernel(0.4, 1.0);
    BandSignal f;
    f.kernel = k;
    f.coeffs.assign(21, Complex(0.3, 0));
    f.node_min = -10;
    f.norm_C = normalization_C(k);
    BandSignal twin;
    twin.kernel = sampling_kernel(0.4, 1.0);
    twin.coeffs.assign(21, Complex(0.3, 0));
    twin.node_min = -10;
    twin.norm_C = normalization_C(twin.kernel);
    for (int n = -30; n <= 30; ++n) EXPECT_EQ(f.eval(n).real() - twin.eval(n).real(), 0);
    const auto seq = integer_sampling(realify(f), -30, 30);
    for (double v : seq.rescaled) {
        EXPECT_GE(v, 0);
        EXPECT_LE(v, 1);
    }
}
