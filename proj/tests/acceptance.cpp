// Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//
// Every seed, sample size and tolerance below is fixed in code. Criterion 8
// needs operator-supplied data and reports SKIP when TSDECOMP_DATA_DIR is unset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tsdecomp/pipeline.hpp"
#include "tsdecomp/tsdecomp.hpp"

using namespace tsdecomp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kSeed = 20261015;

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

double correlation(std::span<const double> a, std::span<const double> b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Fraction of trusted (outside the cone of influence) cells set in `mask`.
double trusted_fraction(const std::vector<std::vector<bool>>& mask, const std::vector<std::vector<bool>>& trusted) {
    std::size_t hit = 0, total = 0;
    for (std::size_t j = 0; j < mask.size(); ++j)
        for (std::size_t t = 0; t < mask[j].size(); ++t)
            if (trusted[j][t]) {
                ++total;
                hit += mask[j][t];
            }
    return total ? static_cast<double>(hit) / total : 0.0;
}

Outcome c1_dft() {
    SeededStream s(kSeed);
    constexpr std::size_t n = 64;
    const auto x = gen_white_noise(n, 1.0, s);
    const auto fast = dft(x);
    double max_diff = 0.0, energy_t = 0.0, energy_f = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{};
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * std::polar(1.0, -kTwoPi * static_cast<double>((k * t) % n) / n);
        max_diff = std::max(max_diff, std::abs(acc - fast[k]));
        energy_t += x[k] * x[k];
        energy_f += std::norm(fast[k]);
    }
    const double parseval = std::abs(energy_f / n - energy_t) / energy_t;
    const bool ok = max_diff < 1e-9 && parseval < 1e-6;
    return {ok ? Status::Pass : Status::Fail,
            fmt("max|fast-direct|=%.3g", max_diff) + fmt(", Parseval rel err=%.3g", parseval)};
}

Outcome c2_emd() {
    const SeededStream root(kSeed);
    double worst = 0.0;
    for (int d = 0; d < 100; ++d) {
        auto s = root.split(d);
        std::vector<double> x;
        switch (d % 3) {
        case 0: x = gen_white_noise(256, 1.0, s); break;
        case 1: x = gen_ar1(256, 0.7, 1.0, s); break;
        default: x = gen_random_walk(256, 1.0, s); break;
        }
        worst = std::max(worst, sift(x).reconstruction_error(x));
    }
    std::vector<double> fast(400), slow(400), sig(400);
    for (std::size_t t = 0; t < 400; ++t) {
        fast[t] = std::sin(kTwoPi * t / 5.0);
        slow[t] = std::sin(kTwoPi * t / 40.0);
        sig[t] = fast[t] + slow[t];
    }
    const auto set = sift(sig);
    const double r = set.size() ? correlation(set.imfs[0], fast) : 0.0;
    const bool ok = worst < 1e-9 && r > 0.95;
    return {ok ? Status::Pass : Status::Fail, fmt("max completeness err=%.3g", worst) + fmt(", IMF1 r=%.4f", r)};
}

Outcome c3_ssa() {
    const SeededStream root(kSeed);
    double worst = 0.0;
    for (int d = 0; d < 20; ++d) {
        auto s = root.split(d);
        const auto x = gen_ar1(144, 0.5, 1.0, s);
        const auto m = embed_decompose(x, 36);
        std::vector<std::size_t> all(m.rank());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const auto y = reconstruct(m, all);
        for (std::size_t t = 0; t < x.size(); ++t) worst = std::max(worst, std::abs(y[t] - x[t]));
    }
    std::vector<double> x(144);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(kTwoPi * t / 12.0 + 0.4);
    const auto shares = scree(embed_decompose(x, 36));
    const double top2 = shares[0] + shares[1];
    const bool ok = worst < 1e-8 && top2 > 0.99;
    return {ok ? Status::Pass : Status::Fail, fmt("max reconstruction err=%.3g", worst) + fmt(", top-2 share=%.6f", top2)};
}

Outcome c4_ridge() {
    constexpr std::size_t n = 51;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::cos(kTwoPi * t / 11.0);
    const auto sc = cwt_morlet(x, ScaleGrid::for_length(n, 2.0, 0.1), 6.0);
    double lo = 1e9, hi = 0.0;
    // Interior columns: the 11-year scale is at least one e-folding time from both ends.
    for (std::size_t t = 18; t <= 32; ++t) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < sc.n_scales(); ++j)
            if (sc.power[j][t] > sc.power[best][t]) best = j;
        lo = std::min(lo, sc.period(best));
        hi = std::max(hi, sc.period(best));
    }
    const bool ok = lo >= 10.0 && hi <= 12.0;
    return {ok ? Status::Pass : Status::Fail, fmt("ridge period range [%.3f", lo) + fmt(", %.3f] years", hi)};
}

Outcome c5_red_noise() {
    constexpr std::size_t n = 128;
    const auto grid = ScaleGrid::for_length(n);
    const MorletPlan plan(n, grid);
    const SeededStream root(kSeed);
    std::vector<double> single, cross;
    std::vector<std::vector<bool>> trusted;
    for (int d = 0; d < 1000; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        const auto x = gen_white_noise(n, 1.0, sx), y = gen_white_noise(n, 1.0, sy);
        auto wx = plan.transform(x);
        const auto wy = plan.transform(y);
        const auto mx = fit_ar1(x), my = fit_ar1(y);
        if (trusted.empty()) trusted = coi_mask(wx);
        single.push_back(trusted_fraction(significance_mask(wx, mx, 0.95), trusted));
        cross.push_back(trusted_fraction(cross_wavelet(wx, wy, mx, my).sig95, trusted));
    }
    const double ms = median(single), mc = median(cross);
    const bool ok = ms >= 0.03 && ms <= 0.07 && mc >= 0.03 && mc <= 0.07;
    return {ok ? Status::Pass : Status::Fail,
            fmt("median flagged: single %.4f", ms) + fmt(", cross %.4f (band 0.03-0.07)", mc)};
}

Outcome c6_stationarity() {
    constexpr std::size_t n = 200;
    constexpr int draws = 500;
    const SeededStream white_root(kSeed), walk_root(kSeed + 1);
    int kpss_white = 0, adf_white = 0, kpss_walk = 0, adf_walk = 0;
    for (int d = 0; d < draws; ++d) {
        auto sw = white_root.split(d);
        const auto w = gen_white_noise(n, 1.0, sw);
        kpss_white += kpss_test(w).p_value.kind == PBound::Kind::GreaterThan;
        adf_white += adf_test(w).p_value.kind == PBound::Kind::LessThan;
        auto sr = walk_root.split(d);
        const auto r = gen_random_walk(n, 1.0, sr);
        kpss_walk += kpss_test(r).p_value.kind == PBound::Kind::LessThan;
        adf_walk += adf_test(r).p_value.kind == PBound::Kind::GreaterThan;
    }
    const bool ok = kpss_white >= 0.90 * draws && adf_white >= 0.90 * draws && kpss_walk >= 0.85 * draws &&
                    adf_walk >= 0.85 * draws;
    std::ostringstream os;
    os << "white: KPSS >0.1 " << kpss_white << "/" << draws << ", ADF <0.01 " << adf_white << "/" << draws
       << "; walk: KPSS <0.01 " << kpss_walk << "/" << draws << ", ADF >0.1 " << adf_walk << "/" << draws;
    return {ok ? Status::Pass : Status::Fail, os.str()};
}

Outcome c7_coherence() {
    constexpr std::size_t n = 128;
    const MorletPlan plan(n, ScaleGrid::for_length(n));
    const SeededStream root(kSeed);
    double r2_min = 1.0, r2_max = 0.0, self_err = 0.0, herm_err = 0.0;
    for (int d = 0; d < 100; ++d) {
        auto sx = root.split(2 * d), sy = root.split(2 * d + 1);
        const auto a = plan.transform(gen_ar1(n, 0.4, 1.0, sx)), b = plan.transform(gen_white_noise(n, 1.0, sy));
        for (const auto& row : coherence(a, b).r2)
            for (double v : row) {
                r2_min = std::min(r2_min, v);
                r2_max = std::max(r2_max, v);
            }
        const auto ab = cross_wavelet(a, b), ba = cross_wavelet(b, a);
        for (std::size_t j = 0; j < ab.n_scales(); ++j)
            for (std::size_t t = 0; t < n; ++t)
                herm_err = std::max(herm_err, std::abs(ab.cross[j][t] - std::conj(ba.cross[j][t])));
        if (d < 10) {
            const auto self = coherence(a, a);
            const auto trusted = coi_mask(a);
            for (std::size_t j = 0; j < self.r2.size(); ++j)
                for (std::size_t t = 0; t < n; ++t)
                    if (trusted[j][t]) self_err = std::max(self_err, std::abs(self.r2[j][t] - 1.0));
        }
    }
    const bool ok = r2_min >= 0.0 && r2_max <= 1.0 + 1e-9 && self_err < 1e-6 && herm_err < 1e-9;
    std::ostringstream os;
    os << "R2 in [" << r2_min << ", " << r2_max << "], |self-1|=" << self_err << ", Hermitian err=" << herm_err;
    return {ok ? Status::Pass : Status::Fail, os.str()};
}

// Operator data: ssn.csv (SILSO monthly), wemo.csv (year,value) and optional fao.csv.
Outcome c8_data() {
    const char* dir = std::getenv("TSDECOMP_DATA_DIR");
    if (!dir || !*dir) return {Status::Skip, "set TSDECOMP_DATA_DIR to a directory with ssn.csv and wemo.csv"};
    namespace fs = std::filesystem;
    const fs::path root(dir);
    auto load = [&](const char* file, const ColumnSchema& schema) {
        auto s = annualize(parse_csv(read_text_file((root / file).string()), schema), {}, file);
        const int first = std::max(1967, s.start_year), last = std::min(2017, s.end_year());
        AnnualSeries out;
        out.start_year = first;
        out.label = s.label;
        out.values.assign(s.values.begin() + (first - s.start_year), s.values.begin() + (last - s.start_year + 1));
        out.validate();
        return out;
    };
    try {
        std::vector<AnnualSeries> all{load("ssn.csv", ColumnSchema::silso_monthly()),
                                      load("wemo.csv", ColumnSchema::two_column())};
        if (fs::exists(root / "fao.csv")) all.push_back(load("fao.csv", ColumnSchema::fao()));

        std::vector<std::vector<double>> detrended;
        bool kpss_ok = true;
        for (const auto& s : all) {
            detrended.push_back(detrend(s, DetrendConfig{}).cycle);
            kpss_ok = kpss_ok && kpss_test(detrended.back()).p_value.kind == PBound::Kind::GreaterThan;
        }
        const auto adf = adf_test(detrended[0]).p_value;
        const bool adf_ok = adf.kind == PBound::Kind::Exact && adf.value > 0.01 && adf.value < 0.05;

        auto band_significant = [&](std::size_t i, int from, double pmin, double pmax, int to) {
            const auto& y = detrended[i];
            std::vector<double> times(y.size());
            for (std::size_t t = 0; t < y.size(); ++t) times[t] = all[i].start_year + static_cast<double>(t);
            const auto sc = analyze_wavelet(y, ScaleGrid::for_length(y.size()), 6.0, times);
            const auto trusted = coi_mask(sc);
            for (std::size_t j = 0; j < sc.n_scales(); ++j) {
                if (sc.period(j) < pmin || sc.period(j) > pmax) continue;
                for (std::size_t t = 0; t < sc.n_times(); ++t)
                    if (times[t] >= from && times[t] <= to && sc.sig95[j][t] && trusted[j][t]) return true;
            }
            return false;
        };
        const bool ssn_ridge = band_significant(0, 1970, 8.0, 14.0, 2000);
        const bool wemo_band = band_significant(1, 1998, 7.0, 16.0, 9999);
        const bool ok = adf_ok && kpss_ok && ssn_ridge && wemo_band;
        std::ostringstream os;
        os << "SSN ADF p=" << adf.to_string() << ", all KPSS >0.1: " << kpss_ok << ", SSN 8-14y ridge: " << ssn_ridge
           << ", WeMO post-1997 7-16y: " << wemo_band;
        return {ok ? Status::Pass : Status::Fail, os.str()};
    } catch (const Error& e) {
        return {Status::Fail, e.what()};
    }
}

Outcome c9_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tsdecomp_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::vector<double>& v) {
        AnnualSeries s;
        s.start_year = 1967;
        s.values = v;
        std::ofstream(dir / name, std::ios::binary) << csv::series(s);
        return (dir / name).string();
    };
    const SeededStream root(kSeed);
    auto s1 = root.split(1), s2 = root.split(2), s3 = root.split(3);
    const std::vector<Tone> tones{{11.0, 1.0, 0.3}, {4.0, 0.5, 1.0}};
    const std::vector<Tone> tone11{{11.0, 0.8, 1.2}};

    RunConfig cfg;
    cfg.inputs = {{"tones", write("tones.csv", gen_sum_of_tones(51, tones, 0.3, s1)), "two_column", ""},
                  {"red", write("red.csv", gen_ar1(51, 0.5, 1.0, s2)), "two_column", ""},
                  {"mixed", write("mixed.csv", gen_sum_of_tones(51, tone11, 0.5, s3)), "two_column", ""}};
    cfg.pairs = {{"tones", "mixed"}, {"tones", "red"}};
    cfg.denoise = "emd";
    cfg.output_dir = (dir / "out").string();

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    try {
        const auto m1 = run_pipeline(cfg);
        const std::string first = slurp(dir / "out" / "manifest.json");
        auto ssa_cfg = cfg;  // a different run in between must not leak state
        ssa_cfg.denoise = "ssa";
        ssa_cfg.output_dir = (dir / "other").string();
        run_pipeline(ssa_cfg);
        const auto m2 = run_pipeline(cfg);
        const std::string second = slurp(dir / "out" / "manifest.json");
        bool artifacts_match = true;
        for (const auto& entry : m2.document.at("outputs"))
            artifacts_match = artifacts_match && sha256_hex(slurp(dir / "out" / entry.at("file").get<std::string>())) ==
                                                     entry.at("sha256").get<std::string>();
        const bool ok = !first.empty() && first == second && artifacts_match && m1.files == m2.files;
        std::ostringstream os;
        os << m2.files.size() << " artifacts, manifest " << first.size() << " bytes, identical: " << (first == second)
           << ", artifact hashes verified: " << artifacts_match;
        fs::remove_all(dir);
        return {ok ? Status::Pass : Status::Fail, os.str()};
    } catch (const Error& e) {
        return {Status::Fail, e.what()};
    }
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "DFT oracle equivalence and Parseval", 1.0, c1_dft},
        {2, "EMD completeness and two-tone separation", 10.0, c2_emd},
        {3, "SSA completeness and sinusoid rank", 5.0, c3_ssa},
        {4, "Wavelet ridge at 11 years (N=51)", 1.0, c4_ridge},
        {5, "Red-noise significance calibration", 120.0, c5_red_noise},
        {6, "Stationarity test verdicts", 120.0, c6_stationarity},
        {7, "Coherence bounds and symmetry", 30.0, c7_coherence},
        {8, "Operator data verdicts", 600.0, c8_data},
        {9, "End-to-end determinism", 60.0, c9_determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o = c.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.status == Status::Pass && secs > c.budget_s) {
            o.status = Status::Fail;
            o.detail += fmt("; over runtime budget of %.0f s", c.budget_s);
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        failures += o.status == Status::Fail;
        std::printf("%s [%d] %s: %s (%.2f s)\n", tag, c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
