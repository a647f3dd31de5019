// Offline Monte Carlo generator for the KPSS and ADF critical-value tables
// embedded in include/tsdecomp/detail/critical_values.hpp.
//
//   gen_critical_values [--reps 100000] [--seed 19671] [--out path]

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsdecomp/detail/unit_root_stats.hpp"
#include "tsdecomp/rng.hpp"

namespace {

constexpr std::array<double, 4> kProbs = {0.01, 0.025, 0.05, 0.10};
constexpr std::array<std::size_t, 5> kSizes = {25, 50, 100, 250, 500};

using Row = std::array<double, 4>;

double quantile(std::vector<double>& v, double q) {
    // Type-7 sample quantile.
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

template <class Stat, class Gen>
std::array<Row, 5> simulate(Stat stat, Gen gen, bool upper_tail, std::size_t reps, tsdecomp::SeededStream root,
                            const char* name) {
    std::array<Row, 5> table{};
    for (std::size_t si = 0; si < kSizes.size(); ++si) {
        const std::size_t n = kSizes[si];
        auto stream = root.split(si);
        std::vector<double> stats(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            const auto x = gen(n, stream);
            stats[r] = stat(x);
        }
        for (std::size_t pi = 0; pi < kProbs.size(); ++pi)
            table[si][pi] = quantile(stats, upper_tail ? 1.0 - kProbs[pi] : kProbs[pi]);
        std::cerr << name << " N=" << n << " done\n";
    }
    return table;
}

void emit(std::ostream& out, const char* name, const std::array<Row, 5>& t) {
    out << "inline constexpr CriticalTable " << name << " = {{{\n";
    for (std::size_t si = 0; si < t.size(); ++si) {
        out << "    {{";
        for (std::size_t pi = 0; pi < t[si].size(); ++pi) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", t[si][pi]);
            out << buf << (pi + 1 < t[si].size() ? ", " : "");
        }
        out << "}},  // N = " << kSizes[si] << "\n";
    }
    out << "}}};\n\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo KPSS / ADF critical values"};
    std::size_t reps = 100000;
    std::uint64_t seed = 19671;
    std::string out_path = "critical_values.hpp";
    app.add_option("--reps", reps, "replications per sample size")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out_path, "output header");
    CLI11_PARSE(app, argc, argv);

    using tsdecomp::ModelVariant;
    using tsdecomp::SeededStream;
    namespace d = tsdecomp::detail;
    const SeededStream root(seed);

    auto white = [](std::size_t n, SeededStream& s) { return tsdecomp::gen_white_noise(n, 1.0, s); };
    auto walk = [](std::size_t n, SeededStream& s) { return tsdecomp::gen_random_walk(n, 1.0, s); };

    const auto kpss_level = simulate([](const auto& x) { return d::kpss_statistic(x, ModelVariant::Drift); }, white,
                                     true, reps, root.split(0), "kpss_level");
    const auto kpss_trend = simulate([](const auto& x) { return d::kpss_statistic(x, ModelVariant::DriftTrend); },
                                     white, true, reps, root.split(1), "kpss_trend");
    const auto adf_none = simulate([](const auto& x) { return d::adf_statistic(x, ModelVariant::NoDriftNoTrend); },
                                   walk, false, reps, root.split(2), "adf_none");
    const auto adf_drift = simulate([](const auto& x) { return d::adf_statistic(x, ModelVariant::Drift); }, walk,
                                    false, reps, root.split(3), "adf_drift");
    const auto adf_trend = simulate([](const auto& x) { return d::adf_statistic(x, ModelVariant::DriftTrend); }, walk,
                                    false, reps, root.split(4), "adf_trend");

    std::ofstream out(out_path);
    out << "#pragma once\n\n"
           "// Generated by tools/gen_critical_values.cpp with seed "
        << seed << " and " << reps
        << " replications per sample size.\n"
           "// Do not edit by hand; rerun the generator instead.\n\n"
           "#include <array>\n#include <cstddef>\n\n"
           "namespace tsdecomp::detail {\n\n"
           "/// Tail probabilities of the tabulated critical values.\n"
           "inline constexpr std::array<double, 4> kCriticalProbabilities = {0.01, 0.025, 0.05, 0.10};\n"
           "inline constexpr std::array<std::size_t, 5> kCriticalSampleSizes = {25, 50, 100, 250, 500};\n\n"
           "/// values[size][prob]: KPSS tables hold upper-tail quantiles (reject when larger),\n"
           "/// ADF tables hold lower-tail quantiles (reject when smaller).\n"
           "struct CriticalTable {\n    std::array<std::array<double, 4>, 5> values;\n};\n\n";
    emit(out, "kKpssLevel", kpss_level);
    emit(out, "kKpssTrend", kpss_trend);
    emit(out, "kAdfNoDriftNoTrend", adf_none);
    emit(out, "kAdfDrift", adf_drift);
    emit(out, "kAdfDriftTrend", adf_trend);
    out << "} // namespace tsdecomp::detail\n";
    return 0;
}
