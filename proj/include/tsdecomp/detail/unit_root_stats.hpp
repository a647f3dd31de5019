#pragma once

// Raw KPSS and augmented Dickey-Fuller statistics. Shared by the test
// front-end and by the offline critical-value generator.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tsdecomp/detail/linalg.hpp"
#include "tsdecomp/error.hpp"

namespace tsdecomp {

/// Deterministic terms of the test regression.
enum class ModelVariant { NoDriftNoTrend, Drift, DriftTrend };

inline const char* to_string(ModelVariant v) {
    switch (v) {
    case ModelVariant::NoDriftNoTrend: return "no_drift_no_trend";
    case ModelVariant::Drift: return "drift";
    case ModelVariant::DriftTrend: return "drift_trend";
    }
    return "?";
}

namespace detail {

inline std::size_t kpss_lag(std::size_t n) {
    return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

inline std::size_t adf_lag(std::size_t n) {
    // Small epsilon so exact cubes (e.g. N - 1 = 125) are not floored one short.
    return static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n - 1)) + 1e-9));
}

/// KPSS statistic. Level stationarity (residuals from the mean) for the first two
/// variants, trend stationarity (residuals from an OLS line) for DriftTrend.
inline double kpss_statistic(std::span<const double> x, ModelVariant variant) {
    const std::size_t n = x.size();
    std::vector<double> e(n);
    if (variant == ModelVariant::DriftTrend) {
        Matrix design(n, 2);
        for (std::size_t t = 0; t < n; ++t) {
            design(t, 0) = 1.0;
            design(t, 1) = static_cast<double>(t + 1);
        }
        e = least_squares(design, x).residuals;
    } else {
        double m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(n);
        for (std::size_t t = 0; t < n; ++t) e[t] = x[t] - m;
    }

    double eta = 0.0, partial = 0.0, s0 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        partial += e[t];
        eta += partial * partial;
        s0 += e[t] * e[t];
    }
    const double nn = static_cast<double>(n);
    eta /= nn * nn;

    const std::size_t lag = kpss_lag(n);
    double lrv = s0 / nn;
    for (std::size_t s = 1; s <= lag && s < n; ++s) {
        double gamma = 0.0;
        for (std::size_t t = s; t < n; ++t) gamma += e[t] * e[t - s];
        lrv += 2.0 * (1.0 - static_cast<double>(s) / static_cast<double>(lag + 1)) * gamma / nn;
    }
    if (!(lrv > 0.0)) throw_degenerate("kpss: non-positive long-run variance");
    return eta / lrv;
}

/// ADF t-ratio of the lagged level in
///   dx_t = rho x_{t-1} + sum_j phi_j dx_{t-j} [+ c] [+ b t] + e_t,
/// fitted to the mean-removed series.
inline double adf_statistic(std::span<const double> x_in, ModelVariant variant) {
    const std::size_t n = x_in.size();
    const std::size_t k = adf_lag(n);
    double m = 0.0;
    for (double v : x_in) m += v;
    m /= static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = x_in[t] - m;

    std::vector<double> dx(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) dx[t] = x[t] - x[t - 1];

    const std::size_t first = k + 1;
    const std::size_t rows = n - first;
    std::size_t cols = 1 + k;
    if (variant != ModelVariant::NoDriftNoTrend) ++cols;
    if (variant == ModelVariant::DriftTrend) ++cols;
    Matrix design(rows, cols);
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        y[r] = dx[t];
        std::size_t c = 0;
        design(r, c++) = x[t - 1];
        for (std::size_t j = 1; j <= k; ++j) design(r, c++) = dx[t - j];
        if (variant != ModelVariant::NoDriftNoTrend) design(r, c++) = 1.0;
        if (variant == ModelVariant::DriftTrend) design(r, c++) = static_cast<double>(t + 1);
    }
    const auto fit = least_squares(design, y);
    const double se = fit.std_error(0);
    if (!(se > 0.0)) throw_degenerate("adf: zero standard error");
    return fit.beta[0] / se;
}

} // namespace detail
} // namespace tsdecomp
