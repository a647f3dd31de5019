#pragma once

// Cross-wavelet power, phase and smoothed wavelet coherence between two
// scalograms on a shared time/scale grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "tsdecomp/error.hpp"
#include "tsdecomp/rng.hpp"
#include "tsdecomp/spectral.hpp"
#include "tsdecomp/wavelet.hpp"

namespace tsdecomp {

struct CrossScalogram {
    std::string label_x;
    std::string label_y;
    std::vector<double> times;
    ScaleGrid grid;
    double omega0 = 6.0;
    std::vector<std::vector<cplx>> cross;  ///< W^X conj(W^Y), [scale][time]
    std::vector<std::vector<double>> power;
    std::vector<std::vector<double>> phase;  ///< in (-pi, pi]
    std::vector<std::vector<bool>> sig95;
    std::vector<double> coi;

    [[nodiscard]] std::size_t n_times() const noexcept { return times.size(); }
    [[nodiscard]] std::size_t n_scales() const noexcept { return grid.scales.size(); }
    [[nodiscard]] double period(std::size_t j) const { return grid.scales[j] * morlet_fourier_factor(omega0); }
};

struct SmoothSpec {
    bool time = true;
    bool scale = true;
    /// Boxcar width in octaves; 0.6 / dj bins on the scale axis.
    double scale_window = 0.6;
};

struct CoherenceMap {
    std::vector<std::vector<double>> r2;  ///< [scale][time]
    SmoothSpec smoothing;
    std::vector<double> coi;
    ScaleGrid grid;
    double omega0 = 6.0;
    std::vector<double> times;
};

namespace detail {

inline void require_same_grid(const Scalogram& x, const Scalogram& y) {
    if (x.n_times() != y.n_times() || x.n_scales() != y.n_scales() || x.omega0 != y.omega0)
        throw_parameter("cross wavelet: time or scale grids differ");
    for (std::size_t j = 0; j < x.n_scales(); ++j)
        if (std::abs(x.grid.scales[j] - y.grid.scales[j]) > 1e-12 * x.grid.scales[j])
            throw_parameter("cross wavelet: time or scale grids differ");
}

/// Modified Bessel function K1 via its integral representation.
inline double bessel_k1(double u) {
    // K1(u) = int_0^inf exp(-u cosh t) cosh t dt; integrand negligible past cosh t = 1 + 40/u.
    const double t_max = std::acosh(1.0 + 40.0 / u);
    constexpr int steps = 4000;
    const double h = t_max / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = h * i;
        const double f = std::exp(-u * std::cosh(t)) * std::cosh(t);
        sum += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    return sum * h;
}

} // namespace detail

/// Quantile of sqrt(X1 X2) for independent chi-square(2) variables X1, X2.
/// The tail is P(Z > z) = z K1(z); z(0.95) = 3.999.
inline double cross_power_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw_parameter("cross_power_quantile: p must lie in (0, 1)");
    double lo = 1e-6, hi = 60.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid * detail::bessel_k1(mid) > 1.0 - p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Pointwise cross spectrum and 95% significance against the two AR(1) backgrounds.
inline CrossScalogram cross_wavelet(const Scalogram& x, const Scalogram& y, const Ar1Model& model_x,
                                    const Ar1Model& model_y, std::string label_x = "x", std::string label_y = "y") {
    detail::require_same_grid(x, y);
    CrossScalogram c;
    c.label_x = std::move(label_x);
    c.label_y = std::move(label_y);
    c.times = x.times;
    c.grid = x.grid;
    c.omega0 = x.omega0;
    c.coi = x.coi;
    const auto bx = background_spectrum(x, model_x);
    const auto by = background_spectrum(y, model_y);
    const double z = cross_power_quantile(0.95) / 2.0;
    const double sd = std::sqrt(x.variance * y.variance);
    const std::size_t nj = x.n_scales(), nt = x.n_times();
    c.cross.assign(nj, std::vector<cplx>(nt));
    c.power.assign(nj, std::vector<double>(nt));
    c.phase.assign(nj, std::vector<double>(nt));
    c.sig95.assign(nj, std::vector<bool>(nt));
    for (std::size_t j = 0; j < nj; ++j) {
        const double thr = z * std::sqrt(bx[j] * by[j]) * sd;
        for (std::size_t t = 0; t < nt; ++t) {
            const cplx w = x.coefficients[j][t] * std::conj(y.coefficients[j][t]);
            c.cross[j][t] = w;
            c.power[j][t] = std::abs(w);
            const double ph = std::arg(w);
            c.phase[j][t] = ph == -std::numbers::pi ? std::numbers::pi : ph;
            c.sig95[j][t] = c.power[j][t] > 0.0 && c.power[j][t] > thr;
        }
    }
    return c;
}

/// Cross spectrum tested against white-noise backgrounds for both series.
inline CrossScalogram cross_wavelet(const Scalogram& x, const Scalogram& y) {
    return cross_wavelet(x, y, Ar1Model{}, Ar1Model{});
}

namespace detail {

/// Scale-then-time smoothing of a [scale][time] field, as used for coherence.
template <class T>
std::vector<std::vector<T>> smooth_field(const std::vector<std::vector<T>>& f, const ScaleGrid& grid,
                                         const SmoothSpec& spec) {
    const std::size_t nj = f.size();
    const std::size_t nt = nj ? f[0].size() : 0;
    std::vector<std::vector<T>> a = f;

    if (spec.scale) {
        // Boxcar of scale_window octaves: half-width in bins, fractional end weights.
        const double half = 0.5 * spec.scale_window / grid.dj;
        const auto whole = static_cast<std::size_t>(std::floor(half));
        const double frac = half - static_cast<double>(whole);
        for (std::size_t j = 0; j < nj; ++j) {
            for (std::size_t t = 0; t < nt; ++t) {
                T sum{};
                double wsum = 0.0;
                const std::size_t reach = whole + (frac > 0.0 ? 1 : 0);
                for (std::size_t d = 0; d <= reach; ++d) {
                    const double w = d <= whole ? 1.0 : frac;
                    if (j + d < nj) {
                        sum += w * f[j + d][t];
                        wsum += w;
                    }
                    if (d > 0 && j >= d) {
                        sum += w * f[j - d][t];
                        wsum += w;
                    }
                }
                a[j][t] = sum / wsum;
            }
        }
    }

    if (!spec.time) return a;
    std::vector<std::vector<T>> out(nj, std::vector<T>(nt));
    for (std::size_t j = 0; j < nj; ++j) {
        const double s = grid.scales[j];
        const auto reach = std::min<std::size_t>(nt - 1, static_cast<std::size_t>(std::ceil(4.0 * s)));
        std::vector<double> w(reach + 1);
        for (std::size_t d = 0; d <= reach; ++d) w[d] = std::exp(-0.5 * (d / s) * (d / s));
        for (std::size_t t = 0; t < nt; ++t) {
            T sum{};
            double wsum = 0.0;
            const std::size_t lo = t > reach ? t - reach : 0;
            const std::size_t hi = std::min(nt - 1, t + reach);
            for (std::size_t k = lo; k <= hi; ++k) {
                const double wk = w[k > t ? k - t : t - k];
                sum += wk * a[j][k];
                wsum += wk;
            }
            out[j][t] = sum / wsum;
        }
    }
    return out;
}

} // namespace detail

/// R^2 = |S(W^XY / s)|^2 / (S(|W^X|^2 / s) S(|W^Y|^2 / s)).
inline CoherenceMap coherence(const Scalogram& x, const Scalogram& y, const SmoothSpec& smooth = {}) {
    detail::require_same_grid(x, y);
    if (!smooth.time && !smooth.scale)
        throw_parameter("coherence: smoothing is disabled, unsmoothed coherence is identically 1");
    if (smooth.scale && !(smooth.scale_window > 0.0)) throw_parameter("coherence: scale window must be positive");
    const std::size_t nj = x.n_scales(), nt = x.n_times();
    std::vector<std::vector<cplx>> xy(nj, std::vector<cplx>(nt));
    std::vector<std::vector<double>> xx(nj, std::vector<double>(nt)), yy(nj, std::vector<double>(nt));
    for (std::size_t j = 0; j < nj; ++j) {
        const double inv_s = 1.0 / x.grid.scales[j];
        for (std::size_t t = 0; t < nt; ++t) {
            xy[j][t] = x.coefficients[j][t] * std::conj(y.coefficients[j][t]) * inv_s;
            xx[j][t] = std::norm(x.coefficients[j][t]) * inv_s;
            yy[j][t] = std::norm(y.coefficients[j][t]) * inv_s;
        }
    }
    const auto sxy = detail::smooth_field(xy, x.grid, smooth);
    const auto sxx = detail::smooth_field(xx, x.grid, smooth);
    const auto syy = detail::smooth_field(yy, x.grid, smooth);

    CoherenceMap m;
    m.smoothing = smooth;
    m.coi = x.coi;
    m.grid = x.grid;
    m.omega0 = x.omega0;
    m.times = x.times;
    m.r2.assign(nj, std::vector<double>(nt, 0.0));
    for (std::size_t j = 0; j < nj; ++j)
        for (std::size_t t = 0; t < nt; ++t) {
            const double den = sxx[j][t] * syy[j][t];
            m.r2[j][t] = den > 0.0 ? std::norm(sxy[j][t]) / den : 0.0;
        }
    return m;
}

/// Pointwise p-quantile of coherence between independent AR(1) surrogate pairs.
inline std::vector<std::vector<double>> coherence_threshold(std::size_t n, const ScaleGrid& grid, double omega0,
                                                            const Ar1Model& model_x, const Ar1Model& model_y,
                                                            SeededStream stream, const SmoothSpec& smooth = {},
                                                            std::size_t n_surrogates = 300, double p = 0.95) {
    if (n_surrogates < 10) throw_parameter("coherence_threshold: need at least 10 surrogate pairs");
    if (!(p > 0.0 && p < 1.0)) throw_parameter("coherence_threshold: p must lie in (0, 1)");
    const MorletPlan plan(n, grid, omega0);
    const std::size_t nj = grid.scales.size();
    std::vector<std::vector<std::vector<double>>> samples(nj, std::vector<std::vector<double>>(n));
    for (std::size_t r = 0; r < n_surrogates; ++r) {
        auto sx = stream.split(2 * r);
        auto sy = stream.split(2 * r + 1);
        const auto a = gen_ar1(n, model_x.alpha, 1.0, sx);
        const auto b = gen_ar1(n, model_y.alpha, 1.0, sy);
        const auto c = coherence(plan.transform(a), plan.transform(b), smooth);
        for (std::size_t j = 0; j < nj; ++j)
            for (std::size_t t = 0; t < n; ++t) samples[j][t].push_back(c.r2[j][t]);
    }
    std::vector<std::vector<double>> thr(nj, std::vector<double>(n));
    for (std::size_t j = 0; j < nj; ++j)
        for (std::size_t t = 0; t < n; ++t) {
            auto& v = samples[j][t];
            std::sort(v.begin(), v.end());
            const double h = (static_cast<double>(v.size()) - 1.0) * p;
            const auto lo = static_cast<std::size_t>(h);
            const std::size_t hi = std::min(lo + 1, v.size() - 1);
            thr[j][t] = v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
        }
    return thr;
}

/// Copy with cross terms and power zeroed at periods longer than `cutoff_period`.
inline CrossScalogram dump_lowfreq_mask(const CrossScalogram& c, double cutoff_period) {
    if (!(cutoff_period > 0.0)) throw_parameter("dump_lowfreq_mask: cutoff period must be positive");
    CrossScalogram out = c;
    for (std::size_t j = 0; j < out.n_scales(); ++j) {
        if (!(out.period(j) > cutoff_period)) continue;
        std::fill(out.cross[j].begin(), out.cross[j].end(), cplx{});
        std::fill(out.power[j].begin(), out.power[j].end(), 0.0);
        std::fill(out.phase[j].begin(), out.phase[j].end(), 0.0);
        std::fill(out.sig95[j].begin(), out.sig95[j].end(), false);
    }
    return out;
}

} // namespace tsdecomp
