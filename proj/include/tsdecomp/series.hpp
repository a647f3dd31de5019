#pragma once

// Core series types: the annual series, the additive trend + cycle + noise
// decomposition, and the autocorrelation / standardization helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tsdecomp/error.hpp"

namespace tsdecomp {

/// Uniformly sampled yearly values, one per consecutive year from start_year.
struct AnnualSeries {
    int start_year = 0;
    std::vector<double> values;
    std::string label;
    std::string unit;

    static constexpr std::size_t kMinLength = 8;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] int end_year() const noexcept { return start_year + static_cast<int>(values.size()) - 1; }

    [[nodiscard]] std::vector<int> years() const {
        std::vector<int> y(values.size());
        std::iota(y.begin(), y.end(), start_year);
        return y;
    }

    /// Throws Data unless the series is long enough and every value is finite.
    void validate() const {
        if (values.size() < kMinLength)
            throw_data("series '" + label + "' has " + std::to_string(values.size()) + " values, need at least 8");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i]))
                throw_data("series '" + label + "' has a non-finite value at year " +
                           std::to_string(start_year + static_cast<int>(i)));
    }
};

enum class Part { Trend, Cycle, Noise };

/// Additive model x = trend + cycle + noise over a source series.
struct Decomposition {
    AnnualSeries source;
    std::vector<double> trend;
    std::vector<double> cycle;
    std::vector<double> noise;
    std::vector<std::string> method_tags;

    static constexpr double kClosureTolerance = 1e-9;

    /// Largest |trend + cycle + noise - source| over all points.
    [[nodiscard]] double closure_error() const {
        const std::size_t n = source.values.size();
        if (trend.size() != n || cycle.size() != n || noise.size() != n)
            return std::numeric_limits<double>::infinity();
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(trend[i] + cycle[i] + noise[i] - source.values[i]));
        return worst;
    }
};

/// Pointwise sum of the selected parts.
inline std::vector<double> recombine(const Decomposition& d, std::span<const Part> parts) {
    if (parts.empty()) throw_parameter("recombine: at least one part is required");
    std::vector<double> out(d.source.values.size(), 0.0);
    bool used[3] = {false, false, false};
    for (Part p : parts) {
        const auto idx = static_cast<std::size_t>(p);
        if (used[idx]) continue;
        used[idx] = true;
        const auto& src = p == Part::Trend ? d.trend : p == Part::Cycle ? d.cycle : d.noise;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += src[i];
    }
    return out;
}

inline std::vector<double> recombine(const Decomposition& d, std::initializer_list<Part> parts) {
    return recombine(d, std::span<const Part>(parts.begin(), parts.size()));
}

struct AcfProfile {
    std::vector<std::size_t> lags;
    std::vector<double> rho;
};

inline double mean(std::span<const double> x) {
    return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// True when every value equals the first (including the empty series).
inline bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

/// Sample variance with the N - 1 divisor.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

/// Biased autocorrelation: lag-k cross products over the full-series sum of squares.
inline AcfProfile acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 1 || max_lag >= n) throw_parameter("acf: max_lag must be in [1, N)");
    const double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0) || is_constant(x)) throw_degenerate("acf: zero-variance series");

    AcfProfile out;
    out.lags.resize(max_lag + 1);
    out.rho.resize(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) ck += (x[t] - m) * (x[t + k] - m);
        out.lags[k] = k;
        out.rho[k] = k == 0 ? 1.0 : ck / c0;
    }
    return out;
}

/// Zero mean, unit sample standard deviation.
inline std::vector<double> standardize(std::span<const double> x) {
    const double var = sample_variance(x);
    if (!(var > 0.0) || is_constant(x)) throw_degenerate("standardize: zero-variance series");
    const double m = mean(x);
    const double sd = std::sqrt(var);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / sd;
    return out;
}

} // namespace tsdecomp
