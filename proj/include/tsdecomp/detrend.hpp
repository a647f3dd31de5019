#pragma once

// Trend extraction: cubic smoothing spline with a frequency-response stiffness
// parameter, and Friedman's variable-span supersmoother.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "tsdecomp/detail/linalg.hpp"
#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"

namespace tsdecomp {

enum class DetrendMethod { Spline, Friedman };

struct DetrendConfig {
    DetrendMethod method = DetrendMethod::Spline;
    /// Wavelength, as a fraction of series length, at which the spline passes 50% of the amplitude.
    double spline_stiffness = 0.67;
    /// Supersmoother bass enhancement in [0, 10]; larger values favour the woofer span.
    double friedman_bass = 0.0;

    void validate() const {
        if (!(spline_stiffness > 0.0 && spline_stiffness <= 1.0))
            throw_parameter("spline stiffness must lie in (0, 1]");
        if (!(friedman_bass >= 0.0 && friedman_bass <= 10.0)) throw_parameter("friedman bass must lie in [0, 10]");
    }
};

/// Penalized cubic smoothing spline on unit-spaced data.
struct SmoothingSplineFit {
    std::vector<double> fitted;
    /// Second derivatives at the interior knots.
    std::vector<double> second_derivatives;
    double lambda = 0.0;

    /// Integral of the squared second derivative of the fitted natural spline.
    [[nodiscard]] double roughness() const {
        const auto& g = second_derivatives;
        double r = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            r += g[i] * g[i] * (2.0 / 3.0);
            if (i + 1 < g.size()) r += 2.0 * g[i] * g[i + 1] / 6.0;
        }
        return r;
    }
};

/// Smoothing parameter giving a 50% frequency response at the given wavelength (samples).
/// The spline's response at angular frequency w is 1 / (1 + lambda * 12 (1 - cos w)^2 / (2 + cos w)).
inline double spline_lambda_for_cutoff(double wavelength) {
    if (!(wavelength > 2.0)) throw_parameter("spline cutoff wavelength must exceed 2 samples");
    const double c = std::cos(2.0 * std::numbers::pi / wavelength);
    return (2.0 + c) / (12.0 * (1.0 - c) * (1.0 - c));
}

/// Minimizes sum (y_i - g(i))^2 + lambda * integral g''^2 (Reinsch form).
inline SmoothingSplineFit smoothing_spline(std::span<const double> y, double lambda) {
    const std::size_t n = y.size();
    if (n < 3) throw_data("smoothing_spline: need at least 3 points");
    if (!(lambda >= 0.0)) throw_parameter("smoothing_spline: lambda must be non-negative");
    const std::size_t m = n - 2;

    // (R + lambda Q'Q) gamma = Q'y with Q the second-difference operator.
    std::vector<std::vector<double>> band(m, std::vector<double>(3, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        band[i][0] = 2.0 / 3.0 + 6.0 * lambda;
        if (i + 1 < m) band[i][1] = 1.0 / 6.0 - 4.0 * lambda;
        if (i + 2 < m) band[i][2] = lambda;
    }
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = y[i] - 2.0 * y[i + 1] + y[i + 2];

    SmoothingSplineFit fit;
    fit.lambda = lambda;
    fit.second_derivatives = detail::solve_banded_spd(std::move(band), std::move(rhs), 2);
    const auto& g = fit.second_derivatives;
    fit.fitted.assign(y.begin(), y.end());
    for (std::size_t i = 0; i < m; ++i) {
        fit.fitted[i] -= lambda * g[i];
        fit.fitted[i + 1] += 2.0 * lambda * g[i];
        fit.fitted[i + 2] -= lambda * g[i];
    }
    return fit;
}

namespace detail {

inline Decomposition make_trend_decomposition(const AnnualSeries& series, std::vector<double> trend,
                                              std::string tag) {
    Decomposition d;
    d.source = series;
    d.cycle.resize(series.values.size());
    for (std::size_t i = 0; i < trend.size(); ++i) d.cycle[i] = series.values[i] - trend[i];
    d.trend = std::move(trend);
    d.noise.assign(series.values.size(), 0.0);
    d.method_tags.push_back(std::move(tag));
    return d;
}

struct RunningLine {
    std::vector<double> smooth;
    std::vector<double> cv_residual;  ///< leave-one-out residuals
};

/// Local linear fit at every point over a symmetric window of `half` neighbours
/// each side, truncated at the series ends. x is the sample index.
inline RunningLine running_line(std::span<const double> y, std::size_t half) {
    const std::size_t n = y.size();
    RunningLine out;
    out.smooth.resize(n);
    out.cv_residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        const double w = static_cast<double>(hi - lo + 1);
        double xm = 0.0, ym = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            xm += static_cast<double>(j);
            ym += y[j];
        }
        xm /= w;
        ym /= w;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            const double dx = static_cast<double>(j) - xm;
            sxx += dx * dx;
            sxy += dx * (y[j] - ym);
        }
        const double dxi = static_cast<double>(i) - xm;
        const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
        out.smooth[i] = ym + slope * dxi;
        const double leverage = 1.0 / w + (sxx > 0.0 ? dxi * dxi / sxx : 0.0);
        out.cv_residual[i] = leverage < 1.0 ? (y[i] - out.smooth[i]) / (1.0 - leverage) : 0.0;
    }
    return out;
}

inline std::size_t span_half_width(double span, std::size_t n) {
    const auto k = static_cast<std::size_t>(std::lround(span * static_cast<double>(n)));
    return std::max<std::size_t>(1, k / 2);
}

} // namespace detail

/// Friedman supersmoother with spans {0.05, 0.2, 0.5} of the series length.
inline std::vector<double> supersmoother(std::span<const double> y, double bass = 0.0) {
    const std::size_t n = y.size();
    if (n < 10) throw_data("supersmoother: need at least 10 points");
    if (!(bass >= 0.0 && bass <= 10.0)) throw_parameter("supersmoother: bass must lie in [0, 10]");

    constexpr std::array<double, 3> spans = {0.05, 0.2, 0.5};
    const std::size_t mid_half = detail::span_half_width(spans[1], n);
    std::array<std::vector<double>, 3> smooths, errs;
    for (std::size_t k = 0; k < 3; ++k) {
        auto rl = detail::running_line(y, detail::span_half_width(spans[k], n));
        smooths[k] = std::move(rl.smooth);
        std::vector<double> abs_res(n);
        for (std::size_t i = 0; i < n; ++i) abs_res[i] = std::abs(rl.cv_residual[i]);
        errs[k] = detail::running_line(abs_res, mid_half).smooth;
    }

    std::vector<double> chosen(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 3; ++k)
            if (errs[k][i] < errs[best][i]) best = k;
        double span = spans[best];
        if (bass > 0.0 && errs[2][i] > 0.0) {
            const double ratio = std::clamp(errs[best][i] / errs[2][i], 1e-7, 1.0);
            span += (spans[2] - span) * std::pow(ratio, 10.0 - bass);
        }
        chosen[i] = span;
    }
    auto span_smooth = detail::running_line(chosen, mid_half).smooth;

    std::vector<double> blended(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::clamp(span_smooth[i], spans[0], spans[2]);
        const std::size_t k = s <= spans[1] ? 0 : 1;
        const double f = (s - spans[k]) / (spans[k + 1] - spans[k]);
        blended[i] = (1.0 - f) * smooths[k][i] + f * smooths[k + 1][i];
    }
    return detail::running_line(blended, detail::span_half_width(spans[0], n)).smooth;
}

/// Trend by cubic smoothing spline; cycle = source - trend, noise = 0.
inline Decomposition detrend_spline(const AnnualSeries& series, double stiffness = 0.67) {
    if (series.values.size() < 8) throw_data("detrend_spline: need at least 8 values");
    if (!(stiffness > 0.0 && stiffness <= 1.0)) throw_parameter("detrend_spline: stiffness must lie in (0, 1]");
    const double wavelength = stiffness * static_cast<double>(series.values.size());
    const double lambda = spline_lambda_for_cutoff(std::max(wavelength, 2.0 + 1e-9));
    auto fit = smoothing_spline(series.values, lambda);
    return detail::make_trend_decomposition(series, std::move(fit.fitted), "detrend:spline");
}

/// Trend by supersmoother; cycle = source - trend, noise = 0.
inline Decomposition detrend_friedman(const AnnualSeries& series, double bass = 0.0) {
    if (series.values.size() < 10) throw_data("detrend_friedman: need at least 10 values");
    auto trend = supersmoother(series.values, bass);
    // Running lines are not mean-preserving near truncated edges; restore the level so the cycle has zero mean.
    double shift = 0.0;
    for (std::size_t i = 0; i < trend.size(); ++i) shift += series.values[i] - trend[i];
    shift /= static_cast<double>(trend.size());
    for (double& v : trend) v += shift;
    return detail::make_trend_decomposition(series, std::move(trend), "detrend:friedman");
}

inline Decomposition detrend(const AnnualSeries& series, const DetrendConfig& config) {
    config.validate();
    return config.method == DetrendMethod::Spline ? detrend_spline(series, config.spline_stiffness)
                                                  : detrend_friedman(series, config.friedman_bass);
}

} // namespace tsdecomp
