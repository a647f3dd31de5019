#pragma once

// Seeded random streams and synthetic series generators.
//
// The generator is SplitMix64 run in counter mode: the n-th draw of stream k
// under seed s is mix(base(s) + (k * 2^32 + n) * GAMMA). GAMMA is odd, so
// distinct (stream, counter) pairs map to distinct 64-bit states and mix() is
// a bijection. Stream ids form a tree (children of k are k*2^16 + c + 1), so
// split streams never overlap while each draws fewer than 2^32 values.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "tsdecomp/error.hpp"

namespace tsdecomp {

class SeededStream {
public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr unsigned kStreamShift = 32;
    static constexpr std::uint64_t kFanOut = 1ULL << 16;

    explicit SeededStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id), base_(mix(seed ^ 0x6A09E667F3BCC909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t index = (stream_id_ << kStreamShift) + counter_++;
        return mix(base_ + index * kGamma);
    }

    /// Independent child stream; the i-th split of a given stream is always the same.
    [[nodiscard]] SeededStream split(std::uint64_t child) const {
        if (child >= kFanOut - 1) throw_parameter("SeededStream::split: child index too large");
        const std::uint64_t id = stream_id_ * kFanOut + child + 1;
        if (id >> kStreamShift) throw_parameter("SeededStream::split: stream tree too deep");
        return SeededStream(seed_, id);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the Box-Muller transform (second variate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Gaussian AR(1) started from its stationary distribution.
inline std::vector<double> gen_ar1(std::size_t n, double alpha, double sigma, SeededStream& stream) {
    if (!(std::abs(alpha) < 1.0)) throw_parameter("gen_ar1: |alpha| must be < 1");
    if (n < 1) throw_parameter("gen_ar1: n must be >= 1");
    if (!(sigma >= 0.0)) throw_parameter("gen_ar1: sigma must be >= 0");
    std::vector<double> x(n);
    x[0] = stream.normal() * sigma / std::sqrt(1.0 - alpha * alpha);
    for (std::size_t t = 1; t < n; ++t) x[t] = alpha * x[t - 1] + sigma * stream.normal();
    return x;
}

inline std::vector<double> gen_white_noise(std::size_t n, double sigma, SeededStream& stream) {
    std::vector<double> x(n);
    for (auto& v : x) v = sigma * stream.normal();
    return x;
}

/// Cumulative sum of Gaussian innovations, starting at the first innovation.
inline std::vector<double> gen_random_walk(std::size_t n, double sigma, SeededStream& stream) {
    std::vector<double> x(n);
    double acc = 0.0;
    for (auto& v : x) {
        acc += sigma * stream.normal();
        v = acc;
    }
    return x;
}

struct Tone {
    double period;     // samples
    double amplitude;
    double phase = 0.0;  // radians
};

/// Sum of A*cos(2*pi*t/T + phi) over tones, plus optional Gaussian noise.
inline std::vector<double> gen_sum_of_tones(std::size_t n, std::span<const Tone> tones, double noise_sd,
                                            SeededStream& stream) {
    for (const auto& tone : tones) {
        if (!(tone.period > 2.0)) throw_parameter("gen_sum_of_tones: tone period must exceed 2 samples");
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double v = 0.0;
        for (const auto& tone : tones)
            v += tone.amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / tone.period + tone.phase);
        x[t] = v;
    }
    if (noise_sd > 0.0) {
        for (auto& v : x) v += noise_sd * stream.normal();
    }
    return x;
}

} // namespace tsdecomp
