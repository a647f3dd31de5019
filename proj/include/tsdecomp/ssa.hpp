#pragma once

// Singular spectrum analysis: Hankel embedding, SVD of the trajectory matrix,
// grouping and diagonal-averaging reconstruction.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tsdecomp/detail/linalg.hpp"
#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"

namespace tsdecomp {

struct SsaModel {
    std::size_t window_length = 0;  ///< L
    std::size_t n_columns = 0;      ///< K = N - L + 1
    std::size_t source_length = 0;  ///< N
    /// Singular values of the trajectory matrix, non-increasing.
    std::vector<double> eigenvalues;
    detail::Matrix left_vectors;   ///< L x r
    detail::Matrix right_vectors;  ///< K x r

    [[nodiscard]] std::size_t rank() const noexcept { return eigenvalues.size(); }
};

struct Grouping {
    std::vector<std::vector<std::size_t>> groups;  ///< zero-based component indices
    std::vector<std::string> labels;

    void validate(std::size_t rank) const {
        if (labels.size() != groups.size()) throw_parameter("grouping: one label per group is required");
        std::set<std::size_t> seen;
        for (const auto& g : groups)
            for (std::size_t i : g) {
                if (i >= rank) throw_parameter("grouping: component index out of range");
                if (!seen.insert(i).second) throw_parameter("grouping: groups must be disjoint");
            }
    }
};

inline std::size_t default_window_length(std::size_t n) { return std::min<std::size_t>(n / 2, 25); }

/// Embeds the series with window L and decomposes the L x K trajectory matrix.
/// Any L in [2, N - 1] is accepted; L and N - L + 1 give the same spectrum.
inline SsaModel embed_decompose(std::span<const double> signal, std::size_t window_length) {
    const std::size_t n = signal.size();
    if (n < 3) throw_data("ssa: need at least 3 values");
    if (window_length < 2 || window_length > n - 1)
        throw_parameter("ssa: window length must lie in [2, N - 1]");
    for (double v : signal)
        if (!std::isfinite(v)) throw_data("ssa: non-finite input value");

    const std::size_t l = window_length;
    const std::size_t k = n - l + 1;
    detail::Matrix traj(l, k);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < k; ++j) traj(i, j) = signal[i + j];

    auto dec = detail::svd(traj);
    SsaModel m;
    m.window_length = l;
    m.n_columns = k;
    m.source_length = n;
    m.eigenvalues = std::move(dec.sigma);
    m.left_vectors = std::move(dec.u);
    m.right_vectors = std::move(dec.v);
    return m;
}

/// Diagonal averaging of sum_{i in group} sigma_i u_i v_i'. An empty group gives zeros.
inline std::vector<double> reconstruct(const SsaModel& model, std::span<const std::size_t> group) {
    const std::size_t l = model.window_length;
    const std::size_t k = model.n_columns;
    std::vector<double> sums(model.source_length, 0.0);
    for (std::size_t c : group) {
        if (c >= model.rank()) throw_parameter("ssa reconstruct: component index out of range");
        const double s = model.eigenvalues[c];
        if (s == 0.0) continue;
        for (std::size_t i = 0; i < l; ++i) {
            const double ui = s * model.left_vectors(i, c);
            for (std::size_t j = 0; j < k; ++j) sums[i + j] += ui * model.right_vectors(j, c);
        }
    }
    const std::size_t lo = std::min(l, k);
    for (std::size_t t = 0; t < sums.size(); ++t) {
        const std::size_t count = std::min({t + 1, lo, model.source_length - t});
        sums[t] /= static_cast<double>(count);
    }
    return sums;
}

inline std::vector<double> reconstruct(const SsaModel& model, std::initializer_list<std::size_t> group) {
    return reconstruct(model, std::span<const std::size_t>(group.begin(), group.size()));
}

/// One reconstructed series per group.
inline std::vector<std::vector<double>> reconstruct(const SsaModel& model, const Grouping& grouping) {
    grouping.validate(model.rank());
    std::vector<std::vector<double>> out;
    out.reserve(grouping.groups.size());
    for (const auto& g : grouping.groups) out.push_back(reconstruct(model, g));
    return out;
}

/// Shares sigma_i^2 / sum sigma^2, descending. All zeros for an all-zero series.
inline std::vector<double> scree(const SsaModel& model) {
    double total = 0.0;
    for (double s : model.eigenvalues) total += s * s;
    std::vector<double> shares(model.rank(), 0.0);
    if (total > 0.0)
        for (std::size_t i = 0; i < shares.size(); ++i)
            shares[i] = model.eigenvalues[i] * model.eigenvalues[i] / total;
    return shares;
}

/// Indices of the trailing components whose cumulative share stays below `threshold`.
inline std::vector<std::size_t> low_eigen_tail(const SsaModel& model, double threshold) {
    const auto shares = scree(model);
    std::vector<std::size_t> tail;
    double cum = 0.0;
    for (std::size_t i = shares.size(); i-- > 0;) {
        cum += shares[i];
        if (!(cum < threshold)) break;
        tail.push_back(i);
    }
    std::reverse(tail.begin(), tail.end());
    return tail;
}

/// noise = reconstruction of the low-eigenvalue tail, cycle = signal - noise, trend = 0.
inline Decomposition denoise_low_eigen(const AnnualSeries& series, std::size_t window_length, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw_parameter("ssa denoise: threshold must lie in (0, 1)");
    const auto model = embed_decompose(series.values, window_length);
    const auto tail = low_eigen_tail(model, threshold);
    Decomposition d;
    d.source = series;
    const std::size_t n = series.values.size();
    d.trend.assign(n, 0.0);
    d.noise = reconstruct(model, tail);
    d.cycle.resize(n);
    for (std::size_t t = 0; t < n; ++t) d.cycle[t] = series.values[t] - d.noise[t];
    d.method_tags.emplace_back("denoise:ssa_low_eigen");
    return d;
}

inline Decomposition denoise_low_eigen(std::span<const double> signal, std::size_t window_length, double threshold) {
    AnnualSeries s;
    s.values.assign(signal.begin(), signal.end());
    return denoise_low_eigen(s, window_length, threshold);
}

} // namespace tsdecomp
