#pragma once

// Empirical mode decomposition by cubic-envelope sifting, first-IMF noise
// removal and the Hilbert amplitude/frequency description of each mode.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "tsdecomp/detail/cubic_spline.hpp"
#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"
#include "tsdecomp/spectral.hpp"

namespace tsdecomp {

struct SiftConfig {
    double epsilon = 0.05;
    std::size_t max_imfs = 10;
    std::size_t max_sifts = 50;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw_parameter("sift: epsilon must lie in (0, 1)");
        if (max_imfs < 1) throw_parameter("sift: max_imfs must be positive");
        if (max_sifts < 1) throw_parameter("sift: max_sifts must be positive");
    }
};

struct ImfSet {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;
    std::vector<std::size_t> sift_counts;
    double epsilon = 0.05;
    /// Per IMF: extrema and zero-crossing counts differ by at most one.
    std::vector<bool> count_conforming;
    /// Per IMF: |envelope mean| stays below 0.1 of the IMF standard deviation.
    std::vector<bool> mean_conforming;

    [[nodiscard]] std::size_t size() const noexcept { return imfs.size(); }

    /// Largest pointwise |sum of IMFs + residual - source|.
    [[nodiscard]] double reconstruction_error(std::span<const double> source) const {
        double worst = 0.0;
        for (std::size_t t = 0; t < source.size(); ++t) {
            double s = residual[t];
            for (const auto& h : imfs) s += h[t];
            worst = std::max(worst, std::abs(s - source[t]));
        }
        return worst;
    }
};

struct HilbertSpectrum {
    std::vector<double> amplitude;
    /// Cycles per sample (cycles/year for annual data); NaN where undefined.
    std::vector<double> frequency;
    std::vector<bool> frequency_defined;
    /// False when the input does not look like an IMF (large envelope mean).
    bool imf_conforming = true;
};

namespace detail {

struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
    [[nodiscard]] std::size_t count() const { return maxima.size() + minima.size(); }
};

// Plateaus are counted once, at their left edge.
inline Extrema find_extrema(std::span<const double> x) {
    Extrema e;
    const std::size_t n = x.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (x[i] == x[i - 1]) continue;
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;
        if (x[i] > x[i - 1] && x[i] > x[j + 1]) e.maxima.push_back(i);
        if (x[i] < x[i - 1] && x[i] < x[j + 1]) e.minima.push_back(i);
    }
    return e;
}

inline std::size_t zero_crossings(std::span<const double> x) {
    std::size_t count = 0;
    int last = 0;
    for (double v : x) {
        const int s = v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

inline bool is_monotone(std::span<const double> x) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < x.size(); ++i) {
        up = up && x[i] >= x[i - 1];
        down = down && x[i] <= x[i - 1];
    }
    return up || down;
}

/// Spline through the extrema at `idx`, with the two nearest extrema at each end
/// reflected about the first and last sample.
inline std::vector<double> envelope(std::span<const double> x, const std::vector<std::size_t>& idx) {
    const std::size_t n = x.size();
    const double right = static_cast<double>(n - 1);
    std::vector<double> kx, ky;
    for (std::size_t k = std::min<std::size_t>(2, idx.size()); k-- > 0;) {
        if (idx[k] == 0) continue;
        kx.push_back(-static_cast<double>(idx[k]));
        ky.push_back(x[idx[k]]);
    }
    for (std::size_t i : idx) {
        kx.push_back(static_cast<double>(i));
        ky.push_back(x[i]);
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(2, idx.size()); ++k) {
        const std::size_t i = idx[idx.size() - 1 - k];
        if (i == n - 1) continue;
        kx.push_back(2.0 * right - static_cast<double>(i));
        ky.push_back(x[i]);
    }
    if (kx.size() < 2) return std::vector<double>(n, ky.empty() ? 0.0 : ky[0]);
    return NaturalCubicSpline(kx, ky).sample(n);
}

/// Mean of the upper and lower envelopes, or empty when either set of extrema is empty.
inline std::vector<double> envelope_mean(std::span<const double> x) {
    const auto e = find_extrema(x);
    if (e.maxima.empty() || e.minima.empty()) return {};
    const auto upper = envelope(x, e.maxima);
    const auto lower = envelope(x, e.minima);
    std::vector<double> m(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) m[t] = 0.5 * (upper[t] + lower[t]);
    return m;
}

inline bool envelope_mean_small(std::span<const double> h) {
    const auto m = envelope_mean(h);
    if (m.empty()) return true;
    const double sd = std::sqrt(sample_variance(h));
    double worst = 0.0;
    for (double v : m) worst = std::max(worst, std::abs(v));
    return worst < 0.1 * sd;
}

/// Sum of squared relative changes between successive sifts, skipping near-zero denominators.
inline double sift_change(std::span<const double> prev, std::span<const double> next) {
    double peak = 0.0;
    for (double v : prev) peak = std::max(peak, std::abs(v));
    const double floor = 1e-12 * peak;
    double sd = 0.0;
    for (std::size_t t = 0; t < prev.size(); ++t) {
        if (std::abs(prev[t]) < floor || prev[t] == 0.0) continue;
        const double r = (prev[t] - next[t]) / prev[t];
        sd += r * r;
    }
    return sd;
}

} // namespace detail

inline ImfSet sift(std::span<const double> signal, const SiftConfig& config = {}) {
    config.validate();
    if (signal.size() < 16) throw_data("sift: need at least 16 values");
    for (double v : signal)
        if (!std::isfinite(v)) throw_data("sift: non-finite input value");

    ImfSet out;
    out.epsilon = config.epsilon;
    out.residual.assign(signal.begin(), signal.end());

    while (out.imfs.size() < config.max_imfs) {
        if (detail::is_monotone(out.residual) || detail::find_extrema(out.residual).count() < 4) break;

        std::vector<double> h = out.residual;
        std::size_t sifts = 0;
        while (sifts < config.max_sifts) {
            const auto m = detail::envelope_mean(h);
            if (m.empty()) break;
            std::vector<double> next(h.size());
            for (std::size_t t = 0; t < h.size(); ++t) next[t] = h[t] - m[t];
            ++sifts;
            const double change = detail::sift_change(h, next);
            h = std::move(next);
            if (change < config.epsilon) break;
        }

        for (std::size_t t = 0; t < h.size(); ++t) out.residual[t] -= h[t];
        const auto ext = detail::find_extrema(h);
        const auto zc = detail::zero_crossings(h);
        const auto diff = ext.count() > zc ? ext.count() - zc : zc - ext.count();
        out.count_conforming.push_back(diff <= 1);
        out.mean_conforming.push_back(detail::envelope_mean_small(h));
        out.sift_counts.push_back(sifts);
        out.imfs.push_back(std::move(h));
    }
    return out;
}

/// noise = IMF 1, cycle = signal - IMF 1, trend = 0 (input assumed detrended).
inline Decomposition denoise_first_imf(const AnnualSeries& series, const SiftConfig& config = {}) {
    const auto set = sift(series.values, config);
    Decomposition d;
    d.source = series;
    const std::size_t n = series.values.size();
    d.trend.assign(n, 0.0);
    d.noise = set.imfs.empty() ? std::vector<double>(n, 0.0) : set.imfs.front();
    d.cycle.resize(n);
    for (std::size_t t = 0; t < n; ++t) d.cycle[t] = series.values[t] - d.noise[t];
    d.method_tags.emplace_back("denoise:emd_first_imf");
    return d;
}

inline Decomposition denoise_first_imf(std::span<const double> signal, double epsilon = 0.05) {
    AnnualSeries s;
    s.values.assign(signal.begin(), signal.end());
    SiftConfig cfg;
    cfg.epsilon = epsilon;
    return denoise_first_imf(s, cfg);
}

/// Instantaneous amplitude and frequency from the FFT analytic signal.
inline HilbertSpectrum hilbert_spectrum(std::span<const double> imf) {
    const std::size_t n = imf.size();
    if (n < 16) throw_data("hilbert_spectrum: need at least 16 values");
    for (double v : imf)
        if (!std::isfinite(v)) throw_data("hilbert_spectrum: non-finite input value");

    auto spec = dft(imf);
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n) spec[k] *= 2.0;
        else if (2 * k > n) spec[k] = 0.0;
    }
    const auto z = idft(spec);

    HilbertSpectrum hs;
    hs.amplitude.resize(n);
    std::vector<double> phase(n);
    double peak = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        hs.amplitude[t] = std::abs(z[t]);
        phase[t] = std::arg(z[t]);
        peak = std::max(peak, hs.amplitude[t]);
    }
    for (std::size_t t = 1; t < n; ++t) {
        double d = phase[t] - phase[t - 1];
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        phase[t] = phase[t - 1] + d;
    }

    hs.frequency.assign(n, std::numeric_limits<double>::quiet_NaN());
    hs.frequency_defined.assign(n, false);
    const double floor = 1e-8 * peak;
    for (std::size_t t = 0; t < n; ++t) {
        if (!(peak > 0.0) || hs.amplitude[t] <= floor) continue;
        const std::size_t a = t == 0 ? 0 : t - 1;
        const std::size_t b = t + 1 == n ? t : t + 1;
        hs.frequency[t] = (phase[b] - phase[a]) / (2.0 * std::numbers::pi * static_cast<double>(b - a));
        hs.frequency_defined[t] = true;
    }
    hs.imf_conforming = peak == 0.0 || detail::envelope_mean_small(imf);
    return hs;
}

} // namespace tsdecomp
