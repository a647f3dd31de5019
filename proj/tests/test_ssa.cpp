#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "tsdecomp/rng.hpp"
#include "tsdecomp/ssa.hpp"

using namespace tsdecomp;

namespace {

std::vector<double> sinusoid(std::size_t n, double period, double amplitude = 1.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = amplitude * std::sin(2.0 * std::numbers::pi * t / period + 0.4);
    return x;
}

Eigen::VectorXd oracle_singular_values(const std::vector<double>& x, std::size_t l) {
    const std::size_t k = x.size() - l + 1;
    Eigen::MatrixXd t(l, k);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < k; ++j) t(i, j) = x[i + j];
    return Eigen::JacobiSVD<Eigen::MatrixXd>(t).singularValues();
}

double rmse(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / a.size());
}

std::vector<std::size_t> all_indices(const SsaModel& m) {
    std::vector<std::size_t> idx(m.rank());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

} // namespace

TEST(EmbedDecompose, SingularValuesMatchEigen) {
    SeededStream s(81);
    for (std::size_t l : {2u, 10u, 25u, 40u}) {
        const auto x = gen_ar1(51, 0.6, 1.0, s);
        const auto m = embed_decompose(x, l);
        const auto ref = oracle_singular_values(x, l);
        ASSERT_EQ(m.rank(), static_cast<std::size_t>(ref.size()));
        for (std::size_t i = 0; i < m.rank(); ++i) EXPECT_NEAR(m.eigenvalues[i], ref(i), 1e-9 * ref(0)) << l << ":" << i;
    }
}

TEST(EmbedDecompose, ModelInvariants) {
    SeededStream s(82);
    const auto x = gen_white_noise(80, 2.0, s);
    const auto m = embed_decompose(x, 30);
    EXPECT_EQ(m.window_length, 30u);
    EXPECT_EQ(m.n_columns, 51u);
    EXPECT_EQ(m.source_length, 80u);
    for (std::size_t i = 0; i + 1 < m.rank(); ++i) EXPECT_GE(m.eigenvalues[i], m.eigenvalues[i + 1]);
    for (double v : m.eigenvalues) EXPECT_GE(v, 0.0);

    double frob = 0, ssum = 0;
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 51; ++j) frob += x[i + j] * x[i + j];
    for (double v : m.eigenvalues) ssum += v * v;
    EXPECT_NEAR(ssum / frob, 1.0, 1e-6);

    for (const auto* basis : {&m.left_vectors, &m.right_vectors})
        for (std::size_t a = 0; a < m.rank(); ++a)
            for (std::size_t b = a; b < m.rank(); ++b) {
                double dot = 0;
                for (std::size_t r = 0; r < basis->rows(); ++r) dot += (*basis)(r, a) * (*basis)(r, b);
                EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-8);
            }
}

TEST(EmbedDecompose, ConstantIsRankOne) {
    const std::vector<double> x(40, 3.5);
    const auto m = embed_decompose(x, 12);
    EXPECT_GT(m.eigenvalues[0], 0.0);
    for (std::size_t i = 1; i < m.rank(); ++i) EXPECT_LT(m.eigenvalues[i], 1e-9 * m.eigenvalues[0]);
    for (double v : reconstruct(m, {0})) EXPECT_NEAR(v, 3.5, 1e-9);
    const auto shares = scree(m);
    EXPECT_NEAR(shares[0], 1.0, 1e-12);
}

TEST(EmbedDecompose, SinusoidConcentratesInTopPair) {
    const auto x = sinusoid(144, 12.0);
    const auto m = embed_decompose(x, 36);
    const auto ref = oracle_singular_values(x, 36);
    const double total = ref.squaredNorm();
    EXPECT_GT((ref(0) * ref(0) + ref(1) * ref(1)) / total, 0.99);
    const auto shares = scree(m);
    EXPECT_GT(shares[0] + shares[1], 0.99);
    EXPECT_NEAR(shares[0], 0.5, 0.05);
    EXPECT_NEAR(shares[1], 0.5, 0.05);
    for (std::size_t i = 2; i < m.rank(); ++i) EXPECT_LT(m.eigenvalues[i], 1e-8 * m.eigenvalues[0]);
    EXPECT_LT(rmse(reconstruct(m, {0, 1}), x), 1e-6);
}

TEST(EmbedDecompose, NoisySinusoidTopPairBeatsNoise) {
    // SNR 10 in variance: sinusoid variance 0.5, noise variance 0.05.
    const SeededStream root(83);
    const double sd = std::sqrt(0.05);
    const auto clean = sinusoid(144, 12.0);
    std::vector<double> errors;
    for (int d = 0; d < 100; ++d) {
        auto s = root.split(d);
        auto x = clean;
        for (auto& v : x) v += sd * s.normal();
        errors.push_back(rmse(reconstruct(embed_decompose(x, 36), {0, 1}), clean));
    }
    std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
    EXPECT_LT(errors[50], sd);
}

TEST(EmbedDecompose, WindowRangeChecked) {
    const std::vector<double> x(20, 1.0);
    EXPECT_THROW(embed_decompose(x, 1), Error);
    EXPECT_THROW(embed_decompose(x, 20), Error);
    EXPECT_NO_THROW(embed_decompose(x, 19));
}

TEST(Reconstruct, FullGroupIsCompleteAndEmptyIsZero) {
    SeededStream s(84);
    const auto x = gen_random_walk(51, 1.0, s);
    for (std::size_t l : {5u, 25u, 47u}) {
        const auto m = embed_decompose(x, l);
        const auto full = reconstruct(m, all_indices(m));
        for (std::size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(full[t], x[t], 1e-8);
    }
    const auto m = embed_decompose(x, 10);
    for (double v : reconstruct(m, std::span<const std::size_t>{})) EXPECT_EQ(v, 0.0);
}

TEST(Reconstruct, LinearInDisjointGroups) {
    SeededStream s(85);
    const auto x = gen_white_noise(60, 1.0, s);
    const auto m = embed_decompose(x, 20);
    const auto a = reconstruct(m, {0, 3, 5});
    const auto b = reconstruct(m, {1, 2, 7, 11});
    const auto ab = reconstruct(m, {0, 1, 2, 3, 5, 7, 11});
    for (std::size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(ab[t], a[t] + b[t], 1e-9);
}

TEST(Reconstruct, GroupingValidation) {
    const std::vector<double> x(30, 1.0);
    const auto m = embed_decompose(x, 10);
    Grouping overlap{{{0, 1}, {1, 2}}, {"a", "b"}};
    EXPECT_THROW(reconstruct(m, overlap), Error);
    Grouping out_of_range{{{0, 10}}, {"a"}};
    EXPECT_THROW(reconstruct(m, out_of_range), Error);
    Grouping ok{{{0}, {1, 2}}, {"trend", "rest"}};
    EXPECT_EQ(reconstruct(m, ok).size(), 2u);
    EXPECT_THROW(reconstruct(m, {10}), Error);
}

TEST(Spectrum, SignFlipAndScaling) {
    SeededStream s(86);
    const auto x = gen_ar1(51, 0.3, 1.0, s);
    std::vector<double> neg(x.size()), scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        neg[i] = -x[i];
        scaled[i] = -3.0 * x[i];
    }
    const auto a = embed_decompose(x, 20), b = embed_decompose(neg, 20), c = embed_decompose(scaled, 20);
    for (std::size_t i = 0; i < a.rank(); ++i) {
        EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-10);
        EXPECT_NEAR(c.eigenvalues[i], 3.0 * a.eigenvalues[i], 1e-9);
    }
}

TEST(Spectrum, TransposeSymmetry) {
    SeededStream s(87);
    const auto x = gen_white_noise(51, 1.0, s);
    for (std::size_t l : {10u, 20u, 25u}) {
        const auto a = embed_decompose(x, l), b = embed_decompose(x, 51 - l + 1);
        ASSERT_EQ(a.rank(), b.rank());
        for (std::size_t i = 0; i < a.rank(); ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-8);
    }
}

TEST(Scree, WhiteNoiseHasNoDominantShare) {
    const SeededStream root(88);
    std::vector<double> largest;
    for (int d = 0; d < 100; ++d) {
        auto s = root.split(d);
        largest.push_back(scree(embed_decompose(gen_white_noise(512, 1.0, s), 64))[0]);
    }
    std::nth_element(largest.begin(), largest.begin() + 50, largest.end());
    EXPECT_LT(largest[50], 0.1);
}

TEST(LowEigenTail, CumulativeShareBelowThreshold) {
    SeededStream s(89);
    const auto x = gen_white_noise(51, 1.0, s);
    const auto m = embed_decompose(x, 25);
    const auto shares = scree(m);
    for (double thr : {0.01, 0.1, 0.3}) {
        const auto tail = low_eigen_tail(m, thr);
        double cum = 0;
        for (std::size_t i : tail) cum += shares[i];
        EXPECT_LT(cum, thr);
        if (!tail.empty()) {
            EXPECT_EQ(tail.back(), m.rank() - 1);
            // Adding the next component would cross the threshold.
            EXPECT_GE(cum + shares[tail.front() - 1], thr);
        }
    }
}

TEST(DenoiseLowEigen, TinyThresholdLeavesSignal) {
    SeededStream s(90);
    const auto x = gen_white_noise(51, 1.0, s);
    const auto d = denoise_low_eigen(x, 25, 1e-12);
    for (std::size_t t = 0; t < x.size(); ++t) {
        EXPECT_EQ(d.noise[t], 0.0);
        EXPECT_EQ(d.cycle[t], x[t]);
    }
}

TEST(DenoiseLowEigen, SinusoidPlusSmallNoise) {
    SeededStream s(91);
    const auto clean = sinusoid(144, 12.0);
    const double sd = 0.1;
    auto x = clean;
    for (auto& v : x) v += sd * s.normal();
    const auto d = denoise_low_eigen(x, 36, 0.02);
    EXPECT_LT(rmse(d.cycle, clean), sd);
    EXPECT_LT(d.closure_error(), Decomposition::kClosureTolerance);
    EXPECT_EQ(d.method_tags.back(), "denoise:ssa_low_eigen");
}

TEST(DenoiseLowEigen, ConstantHasNoNoise) {
    const auto d = denoise_low_eigen(std::vector<double>(40, -2.0), 15, 0.1);
    for (double v : d.noise) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(DenoiseLowEigen, ThresholdRange) {
    EXPECT_THROW(denoise_low_eigen(std::vector<double>(40, 1.0), 10, 0.0), Error);
    EXPECT_THROW(denoise_low_eigen(std::vector<double>(40, 1.0), 10, 1.0), Error);
}

TEST(DefaultWindow, HalfLengthCappedAt25) {
    EXPECT_EQ(default_window_length(51), 25u);
    EXPECT_EQ(default_window_length(30), 15u);
    EXPECT_EQ(default_window_length(400), 25u);
}
