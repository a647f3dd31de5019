#pragma once

// Stationarity (KPSS, ADF) and nonlinearity (Keenan, Tsay, McLeod-Li) tests.
//
// KPSS and ADF p-values come from Monte Carlo critical-value tables and are
// reported as bounds: "<0.01" and ">0.1" outside the tabulated range,
// linearly interpolated inside it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "tsdecomp/detail/critical_values.hpp"
#include "tsdecomp/detail/linalg.hpp"
#include "tsdecomp/detail/special_functions.hpp"
#include "tsdecomp/detail/unit_root_stats.hpp"
#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"

namespace tsdecomp {

struct PBound {
    enum class Kind { Exact, LessThan, GreaterThan };
    Kind kind = Kind::Exact;
    double value = 1.0;

    static PBound exact(double v) { return {Kind::Exact, std::clamp(v, 0.0, 1.0)}; }
    static PBound less_than(double v) { return {Kind::LessThan, v}; }
    static PBound greater_than(double v) { return {Kind::GreaterThan, v}; }

    /// Whether the p-value is certainly below `alpha`.
    [[nodiscard]] bool below(double alpha) const {
        switch (kind) {
        case Kind::Exact: return value < alpha;
        case Kind::LessThan: return value <= alpha;
        case Kind::GreaterThan: return false;
        }
        return false;
    }

    [[nodiscard]] std::string to_string() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.4g", kind == Kind::LessThan ? "<" : kind == Kind::GreaterThan ? ">" : "",
                      value);
        return buf;
    }
};

inline const char* to_string(PBound::Kind k) {
    switch (k) {
    case PBound::Kind::Exact: return "exact";
    case PBound::Kind::LessThan: return "less_than";
    case PBound::Kind::GreaterThan: return "greater_than";
    }
    return "?";
}

struct TestReport {
    std::string test_name;
    double statistic = 0.0;
    PBound p_value;
    std::string null_hypothesis;
    ModelVariant model_variant = ModelVariant::NoDriftNoTrend;
    std::size_t lag = 0;  ///< lag truncation / AR order / Ljung-Box lags, depending on the test
};

namespace detail {

/// Critical values at sample size n, interpolated linearly between table rows.
inline std::array<double, 4> critical_values_at(const CriticalTable& table, std::size_t n) {
    const auto& sizes = kCriticalSampleSizes;
    const double nn = std::clamp(static_cast<double>(n), static_cast<double>(sizes.front()),
                                 static_cast<double>(sizes.back()));
    std::size_t hi = 1;
    while (hi + 1 < sizes.size() && nn > static_cast<double>(sizes[hi])) ++hi;
    const std::size_t lo = hi - 1;
    const double w = (nn - static_cast<double>(sizes[lo])) / static_cast<double>(sizes[hi] - sizes[lo]);
    std::array<double, 4> out{};
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = (1.0 - w) * table.values[lo][p] + w * table.values[hi][p];
    return out;
}

/// Converts a statistic into a p bound. For upper-tail tests the critical values
/// increase as p decreases; for lower-tail tests they decrease.
inline PBound interpolate_p(double stat, const std::array<double, 4>& crit, bool upper_tail) {
    const auto& probs = kCriticalProbabilities;  // ascending: 0.01 .. 0.10
    // Map to an upper-tail orientation: larger s = more extreme.
    const double s = upper_tail ? stat : -stat;
    std::array<double, 4> c{};
    for (std::size_t i = 0; i < 4; ++i) c[i] = upper_tail ? crit[i] : -crit[i];
    if (s >= c[0]) return PBound::less_than(probs[0]);
    if (s <= c[3]) return PBound::greater_than(probs[3]);
    for (std::size_t i = 0; i + 1 < 4; ++i) {
        if (s <= c[i] && s >= c[i + 1]) {
            const double span = c[i] - c[i + 1];
            const double w = span > 0.0 ? (c[i] - s) / span : 0.0;
            return PBound::exact(probs[i] + w * (probs[i + 1] - probs[i]));
        }
    }
    return PBound::greater_than(probs[3]);
}

inline void require_finite(std::span<const double> x, const char* who) {
    for (double v : x)
        if (!std::isfinite(v)) throw_data(std::string(who) + ": non-finite input value");
}

/// Lagged design [1, x_{t-1}, ..., x_{t-p}] for t = p..n-1, and the target x_t.
inline std::pair<Matrix, std::vector<double>> ar_design(std::span<const double> x, std::size_t p) {
    const std::size_t rows = x.size() - p;
    Matrix design(rows, p + 1);
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + p;
        design(r, 0) = 1.0;
        for (std::size_t j = 1; j <= p; ++j) design(r, j) = x[t - j];
        y[r] = x[t];
    }
    return {std::move(design), std::move(y)};
}

/// Regresses e on the columns of z (no intercept) and returns the F statistic
/// ((SSE0 - SSE1) / q) / (SSE1 / df) together with its p-value.
inline std::pair<double, double> residual_f_test(std::span<const double> e, const Matrix& z, double df) {
    double sse0 = 0.0;
    for (double v : e) sse0 += v * v;
    const auto fit = least_squares(z, e);
    const double q = static_cast<double>(z.cols());
    if (!(fit.rss > 0.0) || !(df > 0.0)) throw_degenerate("nonlinearity test: degenerate residual regression");
    const double f = std::max(0.0, (sse0 - fit.rss) / q) / (fit.rss / df);
    return {f, f_sf(f, q, df)};
}

} // namespace detail

/// KPSS test; null hypothesis: stationarity around a level (or a trend for DriftTrend).
inline TestReport kpss_test(std::span<const double> x, ModelVariant variant = ModelVariant::NoDriftNoTrend) {
    if (x.size() < 20) throw_data("kpss_test: need at least 20 values");
    detail::require_finite(x, "kpss_test");
    if (is_constant(x)) throw_degenerate("kpss_test: constant series");
    TestReport r;
    r.test_name = "KPSS";
    r.model_variant = variant;
    r.null_hypothesis =
        variant == ModelVariant::DriftTrend ? "trend stationary" : "level stationary";
    r.lag = detail::kpss_lag(x.size());
    r.statistic = detail::kpss_statistic(x, variant);
    const auto& table = variant == ModelVariant::DriftTrend ? detail::kKpssTrend : detail::kKpssLevel;
    r.p_value = detail::interpolate_p(r.statistic, detail::critical_values_at(table, x.size()), true);
    return r;
}

/// Augmented Dickey-Fuller test; null hypothesis: a unit root.
inline TestReport adf_test(std::span<const double> x, ModelVariant variant = ModelVariant::NoDriftNoTrend) {
    if (x.size() < 20) throw_data("adf_test: need at least 20 values");
    detail::require_finite(x, "adf_test");
    if (is_constant(x)) throw_degenerate("adf_test: constant series");
    TestReport r;
    r.test_name = "ADF";
    r.model_variant = variant;
    r.null_hypothesis = "unit root";
    r.lag = detail::adf_lag(x.size());
    r.statistic = detail::adf_statistic(x, variant);
    const auto& table = variant == ModelVariant::NoDriftNoTrend ? detail::kAdfNoDriftNoTrend
                        : variant == ModelVariant::Drift        ? detail::kAdfDrift
                                                                : detail::kAdfDriftTrend;
    r.p_value = detail::interpolate_p(r.statistic, detail::critical_values_at(table, x.size()), false);
    return r;
}

/// Keenan's one-degree-of-freedom test for a quadratic departure from a linear AR(p).
inline TestReport keenan_test(std::span<const double> x, std::size_t ar_order = 2) {
    if (ar_order < 1) throw_parameter("keenan_test: ar_order must be positive");
    if (x.size() < 3 * ar_order + 10) throw_data("keenan_test: series too short for the AR order");
    detail::require_finite(x, "keenan_test");
    if (is_constant(x)) throw_degenerate("keenan_test: constant series");

    const auto [design, y] = detail::ar_design(x, ar_order);
    const auto ar = detail::least_squares(design, y);
    std::vector<double> fitted_sq(ar.fitted.size());
    for (std::size_t i = 0; i < fitted_sq.size(); ++i) fitted_sq[i] = ar.fitted[i] * ar.fitted[i];
    const auto aux = detail::least_squares(design, fitted_sq);

    detail::Matrix z(aux.residuals.size(), 1);
    for (std::size_t i = 0; i < aux.residuals.size(); ++i) z(i, 0) = aux.residuals[i];
    const double df = static_cast<double>(y.size()) - static_cast<double>(ar_order + 1) - 1.0;
    const auto [f, p] = detail::residual_f_test(ar.residuals, z, df);

    TestReport r;
    r.test_name = "Keenan";
    r.statistic = f;
    r.p_value = PBound::exact(p);
    r.null_hypothesis = "linear AR process";
    r.lag = ar_order;
    return r;
}

/// Tsay's F test: AR(p) residuals against all distinct lag cross-products.
inline TestReport tsay_test(std::span<const double> x, std::size_t ar_order = 2) {
    if (ar_order < 1) throw_parameter("tsay_test: ar_order must be positive");
    const std::size_t m = ar_order * (ar_order + 1) / 2;
    if (x.size() < 3 * ar_order + 10 || x.size() < ar_order + (ar_order + 1) + m + 5)
        throw_data("tsay_test: series too short for the AR order");
    detail::require_finite(x, "tsay_test");
    if (is_constant(x)) throw_degenerate("tsay_test: constant series");

    const auto [design, y] = detail::ar_design(x, ar_order);
    const auto ar = detail::least_squares(design, y);
    const std::size_t rows = y.size();

    detail::Matrix z(rows, m);
    std::size_t col = 0;
    for (std::size_t i = 1; i <= ar_order; ++i) {
        for (std::size_t j = i; j <= ar_order; ++j, ++col) {
            std::vector<double> prod(rows);
            for (std::size_t r = 0; r < rows; ++r) prod[r] = design(r, i) * design(r, j);
            const auto aux = detail::least_squares(design, prod);
            for (std::size_t r = 0; r < rows; ++r) z(r, col) = aux.residuals[r];
        }
    }
    const double df = static_cast<double>(rows) - static_cast<double>(ar_order + 1) - static_cast<double>(m);
    const auto [f, p] = detail::residual_f_test(ar.residuals, z, df);

    TestReport r;
    r.test_name = "Tsay";
    r.statistic = f;
    r.p_value = PBound::exact(p);
    r.null_hypothesis = "linear AR process";
    r.lag = ar_order;
    return r;
}

/// McLeod-Li portmanteau test: Ljung-Box on squared mean-removed values.
inline TestReport mcleod_li_test(std::span<const double> x, std::size_t max_lag = 10) {
    if (max_lag < 1) throw_parameter("mcleod_li_test: max_lag must be positive");
    if (x.size() < 30) throw_data("mcleod_li_test: need at least 30 values");
    if (max_lag >= x.size()) throw_parameter("mcleod_li_test: max_lag must be below the series length");
    detail::require_finite(x, "mcleod_li_test");
    if (is_constant(x)) throw_degenerate("mcleod_li_test: constant series");

    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) sq[t] = (x[t] - m) * (x[t] - m);
    if (is_constant(sq)) throw_degenerate("mcleod_li_test: squared series is constant");
    const auto rho = acf(sq, max_lag).rho;
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= max_lag; ++k) q += rho[k] * rho[k] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);

    TestReport r;
    r.test_name = "McLeod-Li";
    r.statistic = q;
    r.p_value = PBound::exact(detail::chi2_sf(q, static_cast<double>(max_lag)));
    r.null_hypothesis = "no conditional heteroscedasticity";
    r.lag = max_lag;
    return r;
}

} // namespace tsdecomp
