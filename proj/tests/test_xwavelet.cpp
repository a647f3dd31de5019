#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsdecomp/rng.hpp"
#include "tsdecomp/xwavelet.hpp"

using namespace tsdecomp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

std::size_t nearest_scale(const CrossScalogram& c, double period) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c.n_scales(); ++j)
        if (std::abs(c.period(j) - period) < std::abs(c.period(best) - period)) best = j;
    return best;
}

std::size_t nearest_scale(const Scalogram& s, double period) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.n_scales(); ++j)
        if (std::abs(s.period(j) - period) < std::abs(s.period(best) - period)) best = j;
    return best;
}

} // namespace

TEST(BesselK1, MatchesBoost) {
    for (double u : {0.1, 0.5, 1.0, 2.0, 3.99852, 8.0, 20.0})
        EXPECT_NEAR(detail::bessel_k1(u), boost::math::cyl_bessel_k(1, u), 1e-9 * boost::math::cyl_bessel_k(1, u))
            << u;
}

TEST(CrossPowerQuantile, MatchesBoostRootOfTailEquation) {
    for (double p : {0.9, 0.95, 0.99}) {
        const auto f = [p](double z) { return z * boost::math::cyl_bessel_k(1, z) - (1.0 - p); };
        boost::math::tools::eps_tolerance<double> tol(50);
        std::uintmax_t iters = 200;
        const auto [lo, hi] = boost::math::tools::bisect(f, 0.5, 30.0, tol, iters);
        EXPECT_NEAR(cross_power_quantile(p), 0.5 * (lo + hi), 1e-7) << p;
    }
    EXPECT_NEAR(cross_power_quantile(0.95), 3.999, 1e-3);
}

TEST(CrossPowerQuantile, MonteCarloTailIsFivePercent) {
    // sqrt(X1 X2) with X1, X2 independent chi-square(2): X = -2 ln U.
    SeededStream s(201);
    const double z = cross_power_quantile(0.95);
    int above = 0;
    constexpr int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        const double x1 = -2.0 * std::log(s.uniform()), x2 = -2.0 * std::log(s.uniform());
        above += std::sqrt(x1 * x2) > z;
    }
    EXPECT_NEAR(above / static_cast<double>(draws), 0.05, 0.002);
}

TEST(CrossWavelet, SelfProductIsPowerWithZeroPhase) {
    SeededStream s(202);
    const auto sc = cwt_morlet(gen_ar1(64, 0.3, 1.0, s), ScaleGrid::for_length(64));
    const auto c = cross_wavelet(sc, sc);
    for (std::size_t j = 0; j < c.n_scales(); ++j)
        for (std::size_t t = 0; t < c.n_times(); ++t) {
            EXPECT_NEAR(c.power[j][t], sc.power[j][t], 1e-12 * std::max(1.0, sc.power[j][t]));
            EXPECT_EQ(c.phase[j][t], 0.0);
        }
}

TEST(CrossWavelet, HermitianSymmetryAndPhaseDifference) {
    SeededStream s(203);
    const auto grid = ScaleGrid::for_length(80);
    const auto a = cwt_morlet(gen_white_noise(80, 1.0, s), grid), b = cwt_morlet(gen_ar1(80, 0.6, 1.0, s), grid);
    const auto ab = cross_wavelet(a, b), ba = cross_wavelet(b, a);
    for (std::size_t j = 0; j < ab.n_scales(); ++j)
        for (std::size_t t = 0; t < ab.n_times(); ++t) {
            EXPECT_LT(std::abs(ab.cross[j][t] - std::conj(ba.cross[j][t])), 1e-9);
            EXPECT_GE(ab.power[j][t], 0.0);
            EXPECT_GT(ab.phase[j][t], -std::numbers::pi);
            EXPECT_LE(ab.phase[j][t], std::numbers::pi);
            double diff = std::arg(a.coefficients[j][t]) - std::arg(b.coefficients[j][t]);
            diff = std::remainder(diff - ab.phase[j][t], kTwoPi);
            EXPECT_NEAR(diff, 0.0, 1e-9);
        }
}

TEST(CrossWavelet, QuarterPeriodDelayGivesQuarterTurnPhase) {
    constexpr std::size_t n = 128;
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = std::cos(kTwoPi * t / 11.0);
        y[t] = std::cos(kTwoPi * (t - 11.0 / 4.0) / 11.0);
    }
    const auto grid = ScaleGrid::for_length(n);
    const auto c = cross_wavelet(cwt_morlet(x, grid), cwt_morlet(y, grid));
    const auto j = nearest_scale(c, 11.0);
    for (std::size_t t = 20; t < n - 20; ++t) EXPECT_NEAR(c.phase[j][t], std::numbers::pi / 2.0, 0.2) << t;
}

TEST(CrossWavelet, IndependentWhiteNoiseFalsePositives) {
    constexpr std::size_t n = 128;
    const MorletPlan plan(n, ScaleGrid::for_length(n));
    const SeededStream root(204);
    std::vector<double> rates;
    for (int d = 0; d < 300; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        const auto x = gen_white_noise(n, 1.0, sx), y = gen_white_noise(n, 1.0, sy);
        const auto a = plan.transform(x), b = plan.transform(y);
        const auto c = cross_wavelet(a, b, fit_ar1(x), fit_ar1(y));
        const auto trusted = coi_mask(a);
        std::size_t flagged = 0, total = 0;
        for (std::size_t j = 0; j < c.n_scales(); ++j)
            for (std::size_t t = 0; t < n; ++t)
                if (trusted[j][t]) {
                    ++total;
                    flagged += c.sig95[j][t];
                }
        rates.push_back(static_cast<double>(flagged) / total);
    }
    EXPECT_LE(median(rates), 0.07);
    EXPECT_GE(median(rates), 0.02);
}

TEST(CrossWavelet, GridMismatchRejected) {
    SeededStream s(205);
    const auto x = gen_white_noise(64, 1.0, s);
    const auto a = cwt_morlet(x, ScaleGrid::for_length(64));
    const auto b = cwt_morlet(x, ScaleGrid::for_length(64, 2.0, 0.1));
    const auto c = cwt_morlet(std::vector<double>(x.begin(), x.begin() + 60), ScaleGrid::for_length(60));
    EXPECT_THROW(cross_wavelet(a, b), Error);
    EXPECT_THROW(cross_wavelet(a, c), Error);
    EXPECT_THROW(coherence(a, b), Error);
}

TEST(Coherence, BoundedOnRandomPairs) {
    constexpr std::size_t n = 64;
    const MorletPlan plan(n, ScaleGrid::for_length(n));
    const SeededStream root(206);
    for (int d = 0; d < 100; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        const auto m = coherence(plan.transform(gen_ar1(n, 0.5, 1.0, sx)), plan.transform(gen_white_noise(n, 1.0, sy)));
        for (const auto& row : m.r2)
            for (double v : row) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0 + 1e-9);
            }
    }
}

TEST(Coherence, IdenticalInputsGiveOne) {
    SeededStream s(207);
    const auto sc = cwt_morlet(gen_ar1(100, 0.4, 1.0, s), ScaleGrid::for_length(100));
    const auto m = coherence(sc, sc);
    const auto trusted = coi_mask(sc);
    for (std::size_t j = 0; j < sc.n_scales(); ++j)
        for (std::size_t t = 0; t < sc.n_times(); ++t)
            if (trusted[j][t]) { EXPECT_NEAR(m.r2[j][t], 1.0, 1e-6); }
}

TEST(Coherence, SymmetricAndScaleInvariant) {
    SeededStream s(208);
    const auto x = gen_ar1(90, 0.5, 1.0, s), y = gen_white_noise(90, 1.0, s);
    const auto grid = ScaleGrid::for_length(90);
    const MorletPlan plan(90, grid);
    // Raw transforms so the amplitude scaling reaches the coherence itself.
    auto raw = [&](const std::vector<double>& v) {
        Scalogram sc = plan.transform(v);
        sc.coefficients = plan.transform_raw(v);
        return sc;
    };
    std::vector<double> ax(x.size()), by(y.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        ax[t] = 7.0 * x[t];
        by[t] = 0.02 * y[t];
    }
    const auto xy = coherence(raw(x), raw(y)), yx = coherence(raw(y), raw(x)), scaled = coherence(raw(ax), raw(by));
    for (std::size_t j = 0; j < xy.r2.size(); ++j)
        for (std::size_t t = 0; t < xy.r2[j].size(); ++t) {
            EXPECT_NEAR(xy.r2[j][t], yx.r2[j][t], 1e-9);
            EXPECT_NEAR(xy.r2[j][t], scaled.r2[j][t], 1e-9);
        }
}

TEST(Coherence, CommonToneStandsOutAgainstOffScales) {
    constexpr std::size_t n = 128;
    const MorletPlan plan(n, ScaleGrid::for_length(n));
    const SeededStream root(209);
    std::vector<double> at_tone, at_half, at_double;
    SeededStream ps(1);
    const Scalogram probe = plan.transform(gen_white_noise(n, 1.0, ps));
    const auto j11 = nearest_scale(probe, 11.0), j5 = nearest_scale(probe, 5.5), j22 = nearest_scale(probe, 22.0);
    const auto trusted = coi_mask(probe);
    auto non_coi_median = [&](const CoherenceMap& m, std::size_t j) {
        std::vector<double> v;
        for (std::size_t t = 0; t < n; ++t)
            if (trusted[j][t]) v.push_back(m.r2[j][t]);
        return median(v);
    };
    for (int d = 0; d < 200; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        // SNR 1: tone variance equals noise variance.
        std::vector<double> x(n), y(n);
        const auto nx = gen_white_noise(n, std::sqrt(0.5), sx), ny = gen_white_noise(n, std::sqrt(0.5), sy);
        for (std::size_t t = 0; t < n; ++t) {
            const double tone = std::cos(kTwoPi * t / 11.0);
            x[t] = tone + nx[t];
            y[t] = tone + ny[t];
        }
        const auto m = coherence(plan.transform(x), plan.transform(y));
        at_tone.push_back(non_coi_median(m, j11));
        at_half.push_back(non_coi_median(m, j5));
        at_double.push_back(non_coi_median(m, j22));
    }
    EXPECT_GT(median(at_tone), median(at_half));
    EXPECT_GT(median(at_tone), median(at_double));
}

TEST(Coherence, DisabledSmoothingIsAnError) {
    SeededStream s(210);
    const auto sc = cwt_morlet(gen_white_noise(32, 1.0, s), ScaleGrid::for_length(32));
    EXPECT_THROW(coherence(sc, sc, SmoothSpec{false, false, 0.6}), Error);
    EXPECT_NO_THROW(coherence(sc, sc, SmoothSpec{true, false, 0.6}));
    EXPECT_NO_THROW(coherence(sc, sc, SmoothSpec{false, true, 0.6}));
}

TEST(SmoothField, PreservesConstantsAndNormalizes) {
    const auto grid = ScaleGrid::make(2.0, 0.25, 12);
    const std::vector<std::vector<double>> f(12, std::vector<double>(40, 2.5));
    for (const SmoothSpec spec : {SmoothSpec{}, SmoothSpec{true, false, 0.6}, SmoothSpec{false, true, 0.6}})
        for (const auto& row : detail::smooth_field(f, grid, spec))
            for (double v : row) EXPECT_NEAR(v, 2.5, 1e-12);
}

TEST(SmoothField, ScaleBoxcarUsesFractionalEnds) {
    // dj = 0.25 and 0.6 octaves: half-width 1.2 bins, so neighbours at distance 2 weigh 0.2.
    const auto grid = ScaleGrid::make(2.0, 0.25, 7);
    std::vector<std::vector<double>> f(7, std::vector<double>(1, 0.0));
    f[3][0] = 1.0;
    const auto g = detail::smooth_field(f, grid, SmoothSpec{false, true, 0.6});
    const double wsum = 1.0 + 2.0 * 1.0 + 2.0 * 0.2;
    EXPECT_NEAR(g[3][0], 1.0 / wsum, 1e-12);
    EXPECT_NEAR(g[2][0], 1.0 / wsum, 1e-12);
    // Row 1 loses its lower far neighbour, so its weights sum to 3.2.
    EXPECT_NEAR(g[1][0], 0.2 / 3.2, 1e-12);
    EXPECT_NEAR(g[0][0], 0.0, 1e-15);
}

TEST(CoherenceThreshold, ReproducibleBoundedAndCalibrated) {
    constexpr std::size_t n = 64;
    const auto grid = ScaleGrid::for_length(n);
    const Ar1Model mx{0.3, 1.0, false}, my{0.0, 1.0, false};
    const auto thr = coherence_threshold(n, grid, 6.0, mx, my, SeededStream(211), {}, 300);
    EXPECT_EQ(thr, coherence_threshold(n, grid, 6.0, mx, my, SeededStream(211), {}, 300));
    for (const auto& row : thr)
        for (double v : row) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0 + 1e-9);
        }
    // Fresh independent pairs exceed the 95% threshold at roughly 5% of points.
    const MorletPlan plan(n, grid);
    const SeededStream root(212);
    std::size_t above = 0, total = 0;
    for (int d = 0; d < 100; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        const auto m = coherence(plan.transform(gen_ar1(n, 0.3, 1.0, sx)), plan.transform(gen_ar1(n, 0.0, 1.0, sy)));
        for (std::size_t j = 0; j < m.r2.size(); ++j)
            for (std::size_t t = 0; t < n; ++t) {
                ++total;
                above += m.r2[j][t] > thr[j][t];
            }
    }
    EXPECT_NEAR(above / static_cast<double>(total), 0.05, 0.02);
}

TEST(DumpLowfreqMask, CutoffExtremesAndTwoRidges) {
    constexpr std::size_t n = 128;
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = std::cos(kTwoPi * t / 11.0) + std::cos(kTwoPi * t / 5.0);
        y[t] = std::cos(kTwoPi * t / 11.0 + 0.3) + std::cos(kTwoPi * t / 5.0 + 0.3);
    }
    const auto grid = ScaleGrid::for_length(n);
    const auto c = cross_wavelet(cwt_morlet(x, grid), cwt_morlet(y, grid));

    const auto same = dump_lowfreq_mask(c, 1e6);
    EXPECT_EQ(same.power, c.power);
    const auto none = dump_lowfreq_mask(c, 1.0);
    for (const auto& row : none.power)
        for (double v : row) EXPECT_EQ(v, 0.0);

    const auto cut = dump_lowfreq_mask(c, 10.0);
    const auto j11 = nearest_scale(c, 11.0), j5 = nearest_scale(c, 5.0);
    for (std::size_t t = 30; t < n - 30; ++t) {
        EXPECT_EQ(cut.power[j11][t], 0.0);
        EXPECT_EQ(cut.power[j5][t], c.power[j5][t]);
        EXPECT_GT(cut.power[j5][t], 0.0);
    }
    EXPECT_THROW(dump_lowfreq_mask(c, 0.0), Error);
}
