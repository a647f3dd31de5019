#pragma once

// Continuous Morlet wavelet transform with cone of influence and pointwise
// significance against an AR(1) background.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"
#include "tsdecomp/spectral.hpp"

namespace tsdecomp {

/// Scales s_j = s0 * 2^(j dj), j = 0..n_scales-1, in sample units (years).
struct ScaleGrid {
    double s0 = 2.0;
    double dj = 1.0 / 20.0;
    std::size_t n_scales = 0;
    std::vector<double> scales;

    static ScaleGrid make(double s0, double dj, std::size_t n_scales) {
        if (!(s0 >= 2.0)) throw_parameter("scale grid: s0 must be at least 2 samples");
        if (!(dj > 0.0 && dj <= 1.0)) throw_parameter("scale grid: dj must lie in (0, 1]");
        if (n_scales < 1) throw_parameter("scale grid: need at least one scale");
        ScaleGrid g;
        g.s0 = s0;
        g.dj = dj;
        g.n_scales = n_scales;
        g.scales.resize(n_scales);
        for (std::size_t j = 0; j < n_scales; ++j) g.scales[j] = s0 * std::exp2(static_cast<double>(j) * dj);
        return g;
    }

    /// Largest grid whose top scale does not exceed n/2.
    static ScaleGrid for_length(std::size_t n, double s0 = 2.0, double dj = 1.0 / 20.0) {
        const double top = static_cast<double>(n) / 2.0;
        if (!(s0 <= top)) throw_parameter("scale grid: s0 exceeds half the series length");
        const auto j_max = static_cast<std::size_t>(std::floor(std::log2(top / s0) / dj + 1e-9));
        return make(s0, dj, j_max + 1);
    }

    /// Throws Parameter unless the grid is admissible for a series of length n.
    void validate(std::size_t n) const {
        if (scales.size() != n_scales || scales.empty()) throw_parameter("scale grid: inconsistent scale count");
        if (!(scales.front() >= 2.0)) throw_parameter("scale grid: smallest scale must be at least 2 samples");
        for (std::size_t j = 1; j < scales.size(); ++j)
            if (!(scales[j] > scales[j - 1])) throw_parameter("scale grid: scales must increase strictly");
        if (!(scales.back() <= static_cast<double>(n) / 2.0 + 1e-9))
            throw_parameter("scale grid: largest scale exceeds half the series length");
    }
};

/// Fourier period of a Morlet scale: 4 pi s / (w0 + sqrt(2 + w0^2)).
inline double morlet_fourier_factor(double omega0) {
    return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

/// Energy-normalised Morlet wavelet sampled at eta = t / s: (1/s)^{1/2} pi^{-1/4} e^{i w0 eta} e^{-eta^2/2}.
inline cplx morlet_sample(double t, double scale, double omega0) {
    const double eta = t / scale;
    const double norm = std::pow(std::numbers::pi, -0.25) / std::sqrt(scale);
    return norm * std::exp(-0.5 * eta * eta) * std::polar(1.0, omega0 * eta);
}

struct Scalogram {
    std::vector<double> times;  ///< years (or sample index)
    ScaleGrid grid;
    double omega0 = 6.0;
    /// coefficients[j][t] for scale j and time t.
    std::vector<std::vector<cplx>> coefficients;
    std::vector<std::vector<double>> power;
    /// Largest trustworthy scale per time.
    std::vector<double> coi;
    /// Expected background power per scale (unit-variance series); empty until significance is attached.
    std::vector<double> background;
    std::vector<std::vector<bool>> sig90;
    std::vector<std::vector<bool>> sig95;
    /// Variance of the series the coefficients refer to (1 after internal standardization).
    double variance = 1.0;

    [[nodiscard]] std::size_t n_times() const noexcept { return times.size(); }
    [[nodiscard]] std::size_t n_scales() const noexcept { return grid.scales.size(); }
    [[nodiscard]] double period(std::size_t j) const { return grid.scales[j] * morlet_fourier_factor(omega0); }
};

namespace detail {

/// Cone of influence: min(t, N - 1 - t) / sqrt(2), capped at the largest grid scale.
inline std::vector<double> cone_of_influence(std::size_t n, double max_scale) {
    std::vector<double> coi(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double d = static_cast<double>(std::min(t, n - 1 - t));
        coi[t] = std::min(d / std::numbers::sqrt2, max_scale);
    }
    return coi;
}

} // namespace detail

/// Cached kernel spectra for repeated transforms of equal-length series.
class MorletPlan {
public:
    /// Kernel support in units of scale; exp(-7.43^2 / 2) is below 1e-11.
    static constexpr double kSupport = 7.43;

    MorletPlan(std::size_t n, ScaleGrid grid, double omega0 = 6.0) : n_(n), grid_(std::move(grid)), omega0_(omega0) {
        if (n < 16) throw_data("cwt: need at least 16 values");
        if (!(omega0 >= 5.0)) throw_parameter("cwt: omega0 must be at least 5");
        grid_.validate(n);
        const double top = grid_.scales.back();
        half_ = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(kSupport * top)));
        padded_ = 1;
        while (padded_ < n + half_) padded_ <<= 1;
        kernels_.reserve(grid_.scales.size());
        for (double s : grid_.scales) {
            const auto h = std::min<std::size_t>(half_, static_cast<std::size_t>(std::ceil(kSupport * s)));
            std::vector<cplx> k(padded_, cplx{});
            k[0] = morlet_sample(0.0, s, omega0_);
            for (std::size_t m = 1; m <= h; ++m) {
                k[m] = morlet_sample(static_cast<double>(m), s, omega0_);
                k[padded_ - m] = morlet_sample(-static_cast<double>(m), s, omega0_);
            }
            detail::fft_pow2(k, false);
            for (auto& v : k) v = std::conj(v);
            kernels_.push_back(std::move(k));
        }
    }

    [[nodiscard]] std::size_t length() const noexcept { return n_; }
    [[nodiscard]] const ScaleGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] double omega0() const noexcept { return omega0_; }

    /// W_j(n) = sum_k x_k conj(psi((k - n) / s_j)) on the raw (unstandardized) input.
    [[nodiscard]] std::vector<std::vector<cplx>> transform_raw(std::span<const double> x) const {
        if (x.size() != n_) throw_parameter("cwt: series length does not match the plan");
        std::vector<cplx> spec(padded_, cplx{});
        for (std::size_t t = 0; t < n_; ++t) spec[t] = x[t];
        detail::fft_pow2(spec, false);
        std::vector<std::vector<cplx>> out(kernels_.size());
        std::vector<cplx> work(padded_);
        for (std::size_t j = 0; j < kernels_.size(); ++j) {
            for (std::size_t k = 0; k < padded_; ++k) work[k] = spec[k] * kernels_[j][k];
            detail::fft_pow2(work, true);
            out[j].assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(n_));
        }
        return out;
    }

    /// Standardizes the input, transforms it and fills power and cone of influence.
    [[nodiscard]] Scalogram transform(std::span<const double> x, std::span<const double> times = {}) const {
        for (double v : x)
            if (!std::isfinite(v)) throw_data("cwt: non-finite input value");
        const auto z = standardize(x);
        Scalogram sc;
        sc.grid = grid_;
        sc.omega0 = omega0_;
        if (times.empty()) {
            sc.times.resize(n_);
            for (std::size_t t = 0; t < n_; ++t) sc.times[t] = static_cast<double>(t);
        } else {
            if (times.size() != n_) throw_parameter("cwt: time axis length mismatch");
            sc.times.assign(times.begin(), times.end());
        }
        sc.coefficients = transform_raw(z);
        sc.power.resize(sc.coefficients.size());
        for (std::size_t j = 0; j < sc.coefficients.size(); ++j) {
            sc.power[j].resize(n_);
            for (std::size_t t = 0; t < n_; ++t) sc.power[j][t] = std::norm(sc.coefficients[j][t]);
        }
        sc.coi = detail::cone_of_influence(n_, grid_.scales.back());
        sc.variance = 1.0;
        return sc;
    }

private:
    std::size_t n_;
    ScaleGrid grid_;
    double omega0_;
    std::size_t half_ = 0;
    std::size_t padded_ = 0;
    std::vector<std::vector<cplx>> kernels_;
};

inline Scalogram cwt_morlet(std::span<const double> signal, const ScaleGrid& grid, double omega0 = 6.0) {
    return MorletPlan(signal.size(), grid, omega0).transform(signal);
}

/// Background power at each grid scale for the given AR(1) model.
inline std::vector<double> background_spectrum(const Scalogram& sc, const Ar1Model& model) {
    std::vector<double> bg(sc.n_scales());
    for (std::size_t j = 0; j < bg.size(); ++j) bg[j] = ar1_spectrum(model, 1.0 / sc.period(j));
    return bg;
}

/// True where |W|^2 / sigma^2 exceeds P(f_s) chi2_2(p) / 2.
inline std::vector<std::vector<bool>> significance_mask(const Scalogram& sc, const Ar1Model& model, double p) {
    if (!(p > 0.0 && p < 1.0)) throw_parameter("significance: p must lie in (0, 1)");
    const double q = chi2_quantile(p, 2.0) / 2.0;
    const auto bg = background_spectrum(sc, model);
    std::vector<std::vector<bool>> mask(sc.n_scales(), std::vector<bool>(sc.n_times(), false));
    for (std::size_t j = 0; j < sc.n_scales(); ++j) {
        const double thr = bg[j] * q * sc.variance;
        for (std::size_t t = 0; t < sc.n_times(); ++t) {
            const double pw = sc.power[j][t];
            mask[j][t] = pw > 0.0 && pw > thr;
        }
    }
    return mask;
}

/// Fills background, sig90 and sig95.
inline void attach_significance(Scalogram& sc, const Ar1Model& model) {
    sc.background = background_spectrum(sc, model);
    sc.sig90 = significance_mask(sc, model, 0.90);
    sc.sig95 = significance_mask(sc, model, 0.95);
}

/// True where the scale lies below the cone of influence (edge effects negligible).
inline std::vector<std::vector<bool>> coi_mask(const Scalogram& sc) {
    std::vector<std::vector<bool>> mask(sc.n_scales(), std::vector<bool>(sc.n_times(), false));
    for (std::size_t j = 0; j < sc.n_scales(); ++j)
        for (std::size_t t = 0; t < sc.n_times(); ++t) mask[j][t] = sc.grid.scales[j] < sc.coi[t];
    return mask;
}

/// Transform plus significance against the AR(1) fitted to the series itself.
inline Scalogram analyze_wavelet(std::span<const double> signal, const ScaleGrid& grid, double omega0 = 6.0,
                                 std::span<const double> times = {}) {
    auto sc = MorletPlan(signal.size(), grid, omega0).transform(signal, times);
    attach_significance(sc, fit_ar1(signal));
    return sc;
}

} // namespace tsdecomp
