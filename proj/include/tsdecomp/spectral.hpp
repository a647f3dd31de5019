#pragma once

// Fourier transforms, periodograms, the AR(1) red-noise background and
// chi-square quantiles used by the significance tests.
//
// Sign convention: forward transform F_k = sum_t x_t exp(-2 pi i k t / N).
// For real input this is the complex conjugate of the positive-exponent form;
// power spectra are identical under either convention.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "tsdecomp/detail/special_functions.hpp"
#include "tsdecomp/error.hpp"

namespace tsdecomp {

using cplx = std::complex<double>;

namespace detail {

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!std::has_single_bit(n)) throw_parameter("fft_pow2: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles computed directly rather than by recurrence to keep rounding error O(log n).
        std::vector<cplx> tw(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            tw[k] = {std::cos(ang), std::sin(ang)};
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * tw[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= scale;
    }
}

/// Arbitrary-length DFT through Bluestein's chirp-z identity, evaluated with
/// zero-padded power-of-two FFTs of length >= 2N - 1.
inline std::vector<cplx> dft_bluestein(std::span<const cplx> x, bool inverse) {
    const std::size_t n = x.size();
    const std::size_t m = std::bit_ceil(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small and exact.
        const auto k2 = static_cast<double>((static_cast<unsigned long long>(k) * k) % (2 * n));
        const double ang = sign * std::numbers::pi * k2 / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<cplx> a(m, 0.0), b(m, 0.0);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);

    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= scale;
    }
    return out;
}

} // namespace detail

/// Full complex DFT of a complex sequence (any length >= 1).
inline std::vector<cplx> dft(std::span<const cplx> x) {
    if (x.empty()) throw_parameter("dft: empty input");
    if (std::has_single_bit(x.size())) {
        std::vector<cplx> a(x.begin(), x.end());
        detail::fft_pow2(a, false);
        return a;
    }
    return detail::dft_bluestein(x, false);
}

/// Full complex DFT of a real sequence.
inline std::vector<cplx> dft(std::span<const double> x) {
    if (x.size() < 2) throw_parameter("dft: length must be >= 2");
    std::vector<cplx> c(x.begin(), x.end());
    return dft(std::span<const cplx>(c));
}

/// Inverse DFT, scaled by 1/N.
inline std::vector<cplx> idft(std::span<const cplx> f) {
    if (f.empty()) throw_parameter("idft: empty input");
    if (std::has_single_bit(f.size())) {
        std::vector<cplx> a(f.begin(), f.end());
        detail::fft_pow2(a, true);
        return a;
    }
    return detail::dft_bluestein(f, true);
}

struct Periodogram {
    std::vector<double> frequencies;  ///< cycles per sample, k/N for k = 1..floor(N/2)
    std::vector<double> power;        ///< |F_k|^2 / N
    std::size_t n = 0;
};

/// Raw periodogram of the mean-removed signal at the positive Fourier frequencies.
inline Periodogram periodogram(std::span<const double> signal) {
    const std::size_t n = signal.size();
    if (n < 8) throw_data("periodogram: length must be >= 8");
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
    std::vector<double> centered(n);
    std::transform(signal.begin(), signal.end(), centered.begin(), [mean](double v) { return v - mean; });
    const auto f = dft(std::span<const double>(centered));

    Periodogram p;
    p.n = n;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        p.frequencies.push_back(static_cast<double>(k) / static_cast<double>(n));
        p.power.push_back(std::norm(f[k]) / static_cast<double>(n));
    }
    return p;
}

struct Ar1Model {
    double alpha = 0.0;   ///< lag-1 persistence in [0, 1)
    double sigma2 = 1.0;  ///< innovation variance
    bool clamped = false; ///< true when the raw lag-1 autocorrelation fell outside [0, 0.999]
};

/// Lag-1 autocorrelation estimate of an AR(1) red-noise model.
inline Ar1Model fit_ar1(std::span<const double> signal) {
    const std::size_t n = signal.size();
    if (n < 20) throw_data("fit_ar1: length must be >= 20");
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t t = 0; t < n; ++t) c0 += (signal[t] - mean) * (signal[t] - mean);
    for (std::size_t t = 0; t + 1 < n; ++t) c1 += (signal[t] - mean) * (signal[t + 1] - mean);
    if (!(c0 > 0.0)) throw_degenerate("fit_ar1: zero-variance series");

    Ar1Model m;
    const double raw = c1 / c0;
    m.alpha = std::clamp(raw, 0.0, 0.999);
    m.clamped = m.alpha != raw;
    m.sigma2 = c0 / static_cast<double>(n) * (1.0 - m.alpha * m.alpha);
    return m;
}

/// Normalized AR(1) power spectrum (1 - a^2) / |1 - a e^{-2 pi i f}|^2 at f cycles per sample.
/// Its mean over [0, 0.5] is exactly one.
inline double ar1_spectrum(const Ar1Model& model, double frequency) {
    if (frequency < 0.0 || frequency > 0.5) throw_parameter("ar1_spectrum: frequency must lie in [0, 0.5]");
    const double a = model.alpha;
    return (1.0 - a * a) / (1.0 + a * a - 2.0 * a * std::cos(2.0 * std::numbers::pi * frequency));
}

/// AR(1) spectrum evaluated on a frequency grid and rescaled to unit mean over that grid.
inline std::vector<double> ar1_spectrum(const Ar1Model& model, std::span<const double> frequencies) {
    std::vector<double> out;
    out.reserve(frequencies.size());
    for (double f : frequencies) out.push_back(ar1_spectrum(model, f));
    if (!out.empty()) {
        const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
        for (auto& v : out) v /= mean;
    }
    return out;
}

/// Quantile of the chi-square distribution with `dof` degrees of freedom.
inline double chi2_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw_parameter("chi2_quantile: p must lie in (0, 1)");
    if (!(dof > 0.0)) throw_parameter("chi2_quantile: degrees of freedom must be positive");

    // Bracket, then Newton steps safeguarded by bisection.
    double lo = 0.0, hi = std::max(1.0, dof);
    while (detail::chi2_cdf(hi, dof) < p) {
        lo = hi;
        hi *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    const double half = 0.5 * dof;
    const double log_norm = std::lgamma(half) + half * std::log(2.0);
    for (int it = 0; it < 200; ++it) {
        const double cdf = detail::chi2_cdf(x, dof);
        const double err = cdf - p;
        if (std::abs(err) < 1e-14) break;
        (err > 0.0 ? hi : lo) = x;
        const double pdf = std::exp((half - 1.0) * std::log(x) - 0.5 * x - log_norm);
        double next = pdf > 0.0 ? x - err / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * hi) break;
        x = next;
    }
    return x;
}

} // namespace tsdecomp
