#pragma once

// End-to-end analysis run: ingest -> annualize -> detrend -> stationarity and
// nonlinearity reports -> EMD / SSA noise removal -> wavelet scalograms ->
// pairwise cross-wavelet and coherence, with a hashed manifest.
//
// Requires nlohmann/json and OpenSSL libcrypto (SHA-256).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include <openssl/evp.h>

#include "tsdecomp/detrend.hpp"
#include "tsdecomp/emd.hpp"
#include "tsdecomp/ingest.hpp"
#include "tsdecomp/io.hpp"
#include "tsdecomp/rng.hpp"
#include "tsdecomp/spectral.hpp"
#include "tsdecomp/ssa.hpp"
#include "tsdecomp/stattests.hpp"
#include "tsdecomp/svg.hpp"
#include "tsdecomp/wavelet.hpp"
#include "tsdecomp/xwavelet.hpp"

namespace tsdecomp {

/// Environment variable that overrides the configured seed.
inline constexpr const char* kSeedEnvVar = "TSDECOMP_SEED";

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw_degenerate("sha256: digest computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

struct InputSpec {
    std::string label;
    std::string path;
    std::string schema = "two_column";
    std::string unit;
};

struct RunConfig {
    std::vector<InputSpec> inputs;
    std::size_t min_records_per_year = 1;

    std::string detrend_method = "spline";  ///< spline | friedman
    double spline_stiffness = 0.67;
    double friedman_bass = 0.0;

    std::string test_variant = "no_drift_no_trend";
    std::size_t keenan_order = 2;
    std::size_t tsay_order = 2;
    std::size_t mcleod_lags = 10;

    std::string denoise = "emd";  ///< emd | ssa | none
    double emd_epsilon = 0.05;
    std::size_t emd_max_imfs = 10;
    std::size_t emd_max_sifts = 50;
    std::vector<std::string> emd_skip;  ///< labels whose first IMF is kept
    std::size_t ssa_window = 0;         ///< 0 selects min(N/2, 25)
    double ssa_threshold = 0.02;

    double wavelet_s0 = 2.0;
    double wavelet_dj = 0.05;
    double wavelet_omega0 = 6.0;

    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t coherence_surrogates = 300;
    double lowfreq_cutoff = 0.0;  ///< 0 keeps all periods

    std::uint64_t seed = 20261015;
    std::string output_dir = "tsdecomp_out";

    static RunConfig from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw_parameter("config: top level must be a JSON object");
        static const std::set<std::string> known = {
            "inputs",         "min_records_per_year", "detrend_method", "spline_stiffness",   "friedman_bass",
            "test_variant",   "keenan_order",         "tsay_order",     "mcleod_lags",        "denoise",
            "emd_epsilon",    "emd_max_imfs",         "emd_max_sifts",  "emd_skip",           "ssa_window",
            "ssa_threshold",  "wavelet_s0",           "wavelet_dj",     "wavelet_omega0",     "pairs",
            "coherence_surrogates", "lowfreq_cutoff", "seed",           "output_dir"};
        for (const auto& [key, _] : j.items())
            if (!known.contains(key)) throw_parameter("config: unknown key '" + key + "'");

        RunConfig c;
        try {
            if (j.contains("inputs")) {
                for (const auto& in : j.at("inputs")) {
                    InputSpec s;
                    s.label = in.at("label").get<std::string>();
                    s.path = in.at("path").get<std::string>();
                    if (in.contains("schema")) s.schema = in.at("schema").get<std::string>();
                    if (in.contains("unit")) s.unit = in.at("unit").get<std::string>();
                    c.inputs.push_back(std::move(s));
                }
            }
            auto get = [&](const char* key, auto& field) {
                if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
            };
            get("min_records_per_year", c.min_records_per_year);
            get("detrend_method", c.detrend_method);
            get("spline_stiffness", c.spline_stiffness);
            get("friedman_bass", c.friedman_bass);
            get("test_variant", c.test_variant);
            get("keenan_order", c.keenan_order);
            get("tsay_order", c.tsay_order);
            get("mcleod_lags", c.mcleod_lags);
            get("denoise", c.denoise);
            get("emd_epsilon", c.emd_epsilon);
            get("emd_max_imfs", c.emd_max_imfs);
            get("emd_max_sifts", c.emd_max_sifts);
            get("emd_skip", c.emd_skip);
            get("ssa_window", c.ssa_window);
            get("ssa_threshold", c.ssa_threshold);
            get("wavelet_s0", c.wavelet_s0);
            get("wavelet_dj", c.wavelet_dj);
            get("wavelet_omega0", c.wavelet_omega0);
            if (j.contains("pairs"))
                for (const auto& p : j.at("pairs")) {
                    if (!p.is_array() || p.size() != 2) throw_parameter("config: each pair must list two labels");
                    c.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
                }
            get("coherence_surrogates", c.coherence_surrogates);
            get("lowfreq_cutoff", c.lowfreq_cutoff);
            get("seed", c.seed);
            get("output_dir", c.output_dir);
        } catch (const nlohmann::json::exception& e) {
            throw_parameter(std::string("config: ") + e.what());
        }
        return c;
    }

    /// Every field, defaults included.
    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json ins = nlohmann::json::array();
        for (const auto& in : inputs)
            ins.push_back({{"label", in.label}, {"path", in.path}, {"schema", in.schema}, {"unit", in.unit}});
        nlohmann::json prs = nlohmann::json::array();
        for (const auto& [a, b] : pairs) prs.push_back({a, b});
        return {{"inputs", ins},
                {"min_records_per_year", min_records_per_year},
                {"detrend_method", detrend_method},
                {"spline_stiffness", spline_stiffness},
                {"friedman_bass", friedman_bass},
                {"test_variant", test_variant},
                {"keenan_order", keenan_order},
                {"tsay_order", tsay_order},
                {"mcleod_lags", mcleod_lags},
                {"denoise", denoise},
                {"emd_epsilon", emd_epsilon},
                {"emd_max_imfs", emd_max_imfs},
                {"emd_max_sifts", emd_max_sifts},
                {"emd_skip", emd_skip},
                {"ssa_window", ssa_window},
                {"ssa_threshold", ssa_threshold},
                {"wavelet_s0", wavelet_s0},
                {"wavelet_dj", wavelet_dj},
                {"wavelet_omega0", wavelet_omega0},
                {"pairs", prs},
                {"coherence_surrogates", coherence_surrogates},
                {"lowfreq_cutoff", lowfreq_cutoff},
                {"seed", seed},
                {"output_dir", output_dir}};
    }

    [[nodiscard]] ModelVariant variant() const {
        if (test_variant == "no_drift_no_trend") return ModelVariant::NoDriftNoTrend;
        if (test_variant == "drift") return ModelVariant::Drift;
        if (test_variant == "drift_trend") return ModelVariant::DriftTrend;
        throw_parameter("config: test_variant must be no_drift_no_trend, drift or drift_trend");
    }

    /// Checks ranges and references; does not touch the filesystem.
    void validate() const {
        if (inputs.empty()) throw_parameter("config: at least one input is required");
        std::set<std::string> labels;
        for (const auto& in : inputs) {
            if (in.label.empty()) throw_parameter("config: input label must not be empty");
            if (!labels.insert(in.label).second) throw_parameter("config: duplicate input label '" + in.label + "'");
            ColumnSchema::by_name(in.schema);
        }
        if (detrend_method != "spline" && detrend_method != "friedman")
            throw_parameter("config: detrend_method must be spline or friedman");
        DetrendConfig{detrend_method == "spline" ? DetrendMethod::Spline : DetrendMethod::Friedman, spline_stiffness,
                      friedman_bass}
            .validate();
        static_cast<void>(variant());
        if (keenan_order < 1 || tsay_order < 1 || mcleod_lags < 1)
            throw_parameter("config: test orders and lags must be positive");
        if (denoise != "emd" && denoise != "ssa" && denoise != "none")
            throw_parameter("config: denoise must be emd, ssa or none");
        SiftConfig{emd_epsilon, emd_max_imfs, emd_max_sifts}.validate();
        for (const auto& l : emd_skip)
            if (!labels.contains(l)) throw_parameter("config: emd_skip names unknown label '" + l + "'");
        if (!(ssa_threshold > 0.0 && ssa_threshold < 1.0)) throw_parameter("config: ssa_threshold must lie in (0, 1)");
        if (!(wavelet_s0 >= 2.0)) throw_parameter("config: wavelet_s0 must be at least 2");
        if (!(wavelet_dj > 0.0 && wavelet_dj <= 1.0)) throw_parameter("config: wavelet_dj must lie in (0, 1]");
        if (!(wavelet_omega0 >= 5.0)) throw_parameter("config: wavelet_omega0 must be at least 5");
        for (const auto& [a, b] : pairs)
            if (!labels.contains(a) || !labels.contains(b))
                throw_parameter("config: pair (" + a + ", " + b + ") names an unknown label");
        if (!pairs.empty() && coherence_surrogates < 10)
            throw_parameter("config: coherence_surrogates must be at least 10");
        if (!(lowfreq_cutoff >= 0.0)) throw_parameter("config: lowfreq_cutoff must be non-negative");
        if (output_dir.empty()) throw_parameter("config: output_dir must not be empty");
    }
};

/// Reads a JSON config file; parse failures are configuration errors.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_parameter("cannot open config file '" + path + "'");
    try {
        return RunConfig::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw_parameter("config '" + path + "': " + e.what());
    }
}

/// Seed from the environment variable when set, else `fallback`.
inline std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* v = std::getenv(kSeedEnvVar);
    if (!v || !*v) return fallback;
    std::uint64_t out = 0;
    const std::string_view s(v);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw_parameter(std::string(kSeedEnvVar) + " must be an unsigned integer");
    return out;
}

struct RunManifest {
    nlohmann::json document;
    std::vector<std::string> files;  ///< written artifacts, relative to the output directory

    [[nodiscard]] std::string text() const { return document.dump(2) + "\n"; }
};

namespace detail {

inline std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

/// Re-raises module errors with the pipeline stage prefixed.
template <class F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), "stage '" + stage + "': " + e.what());
    }
}

struct SeriesResult {
    AnnualSeries annual;
    Decomposition decomposition;
    std::vector<double> analysed;  ///< cycle after noise removal
};

inline AnnualSeries slice_years(const AnnualSeries& s, int first, int last) {
    AnnualSeries out;
    out.start_year = first;
    out.label = s.label;
    out.unit = s.unit;
    out.values.assign(s.values.begin() + (first - s.start_year), s.values.begin() + (last - s.start_year + 1));
    return out;
}

} // namespace detail

/// Runs the full analysis. Nothing is written unless every stage succeeds; if
/// writing fails, files already written by this run are removed.
inline RunManifest run_pipeline(const RunConfig& config) {
    config.validate();
    std::map<std::string, std::string> artifacts;
    nlohmann::json inputs_doc = nlohmann::json::array();
    nlohmann::json reports_doc = nlohmann::json::object();
    std::map<std::string, detail::SeriesResult> results;
    const ModelVariant variant = config.variant();

    for (const auto& in : config.inputs) {
        const std::string stem = detail::file_stem(in.label);
        const std::string raw_text =
            detail::run_stage("ingest[" + in.label + "]", [&] { return read_text_file(in.path); });
        inputs_doc.push_back({{"label", in.label}, {"path", in.path}, {"sha256", sha256_hex(raw_text)}});

        detail::SeriesResult res;
        res.annual = detail::run_stage("annualize[" + in.label + "]", [&] {
            auto records = parse_csv(raw_text, ColumnSchema::by_name(in.schema));
            auto s = annualize(records, MeanPolicy{config.min_records_per_year}, in.label, in.unit);
            s.validate();
            return s;
        });
        artifacts[stem + "_annual.csv"] = csv::series(res.annual);

        auto dec = detail::run_stage("detrend[" + in.label + "]", [&] {
            DetrendConfig dc;
            dc.method = config.detrend_method == "spline" ? DetrendMethod::Spline : DetrendMethod::Friedman;
            dc.spline_stiffness = config.spline_stiffness;
            dc.friedman_bass = config.friedman_bass;
            return detrend(res.annual, dc);
        });
        const std::vector<double> detrended = dec.cycle;

        reports_doc[in.label] = detail::run_stage("tests[" + in.label + "]", [&] {
            nlohmann::json arr = nlohmann::json::array();
            arr.push_back(to_json(kpss_test(detrended, variant)));
            arr.push_back(to_json(adf_test(detrended, variant)));
            arr.push_back(to_json(keenan_test(detrended, config.keenan_order)));
            arr.push_back(to_json(tsay_test(detrended, config.tsay_order)));
            arr.push_back(to_json(mcleod_li_test(detrended, config.mcleod_lags)));
            return arr;
        });

        const SiftConfig sift_cfg{config.emd_epsilon, config.emd_max_imfs, config.emd_max_sifts};
        const ImfSet imfs = detail::run_stage("emd[" + in.label + "]", [&] { return sift(detrended, sift_cfg); });
        artifacts[stem + "_imfs.csv"] = csv::imf_set(imfs, res.annual.start_year);
        if (!imfs.imfs.empty())
            artifacts[stem + "_imf1_periodogram.csv"] = csv::periodogram(
                detail::run_stage("emd_fft[" + in.label + "]", [&] { return periodogram(imfs.imfs.front()); }));

        const std::size_t window =
            config.ssa_window ? config.ssa_window : default_window_length(res.annual.values.size());
        const auto ssa_model =
            detail::run_stage("ssa[" + in.label + "]", [&] { return embed_decompose(detrended, window); });
        artifacts[stem + "_ssa_scree.csv"] = csv::scree(scree(ssa_model));

        std::vector<double> noise(detrended.size(), 0.0);
        const bool skip_emd = std::find(config.emd_skip.begin(), config.emd_skip.end(), in.label) !=
                              config.emd_skip.end();
        if (config.denoise == "emd" && !skip_emd) {
            if (!imfs.imfs.empty()) noise = imfs.imfs.front();
            dec.method_tags.emplace_back("denoise:emd_first_imf");
        } else if (config.denoise == "ssa") {
            noise = reconstruct(ssa_model, low_eigen_tail(ssa_model, config.ssa_threshold));
            dec.method_tags.emplace_back("denoise:ssa_low_eigen");
        }
        for (std::size_t t = 0; t < noise.size(); ++t) dec.cycle[t] -= noise[t];
        dec.noise = std::move(noise);
        double scale = 1.0;
        for (double v : res.annual.values) scale = std::max(scale, std::abs(v));
        if (!(dec.closure_error() <= Decomposition::kClosureTolerance * scale))
            throw Error(ErrorKind::Degenerate, "stage 'denoise[" + in.label + "]': decomposition does not close");
        artifacts[stem + "_decomposition.csv"] = csv::decomposition(dec);

        const auto years = res.annual.years();
        const std::vector<double> times(years.begin(), years.end());
        const auto sc = detail::run_stage("wavelet[" + in.label + "]", [&] {
            const auto grid = ScaleGrid::for_length(dec.cycle.size(), config.wavelet_s0, config.wavelet_dj);
            return analyze_wavelet(dec.cycle, grid, config.wavelet_omega0, times);
        });
        artifacts[stem + "_scalogram.csv"] = csv::scalogram(sc);
        artifacts[stem + "_scalogram.svg"] = svg::heatmap(svg::from_scalogram(sc, in.label + " wavelet power"));

        res.analysed = dec.cycle;
        res.decomposition = std::move(dec);
        results.emplace(in.label, std::move(res));
    }
    artifacts["tests.json"] = reports_doc.dump(2) + "\n";

    const SeededStream root(config.seed);
    for (std::size_t pi = 0; pi < config.pairs.size(); ++pi) {
        const auto& [la, lb] = config.pairs[pi];
        const std::string name = la + "~" + lb;
        const std::string stem = detail::file_stem(la) + "__" + detail::file_stem(lb);
        detail::run_stage("xwavelet[" + name + "]", [&] {
            const auto& ra = results.at(la);
            const auto& rb = results.at(lb);
            const int first = std::max(ra.annual.start_year, rb.annual.start_year);
            const int last = std::min(ra.annual.end_year(), rb.annual.end_year());
            if (last - first + 1 < 16) throw_data("pair series overlap by fewer than 16 years");
            AnnualSeries sa = ra.annual, sb = rb.annual;
            sa.values = ra.analysed;
            sb.values = rb.analysed;
            sa = detail::slice_years(sa, first, last);
            sb = detail::slice_years(sb, first, last);
            const std::size_t n = sa.values.size();
            std::vector<double> times(n);
            for (std::size_t t = 0; t < n; ++t) times[t] = first + static_cast<int>(t);

            const auto grid = ScaleGrid::for_length(n, config.wavelet_s0, config.wavelet_dj);
            const MorletPlan plan(n, grid, config.wavelet_omega0);
            const auto wa = plan.transform(sa.values, times);
            const auto wb = plan.transform(sb.values, times);
            const auto ma = fit_ar1(sa.values);
            const auto mb = fit_ar1(sb.values);
            auto cross = cross_wavelet(wa, wb, ma, mb, la, lb);
            if (config.lowfreq_cutoff > 0.0) cross = dump_lowfreq_mask(cross, config.lowfreq_cutoff);
            const auto coh = coherence(wa, wb);
            const auto thr = coherence_threshold(n, grid, config.wavelet_omega0, ma, mb, root.split(pi), {},
                                                 config.coherence_surrogates);
            artifacts[stem + "_cross.csv"] = csv::cross(cross, &coh, &thr);
            artifacts[stem + "_cross.svg"] = svg::heatmap(svg::from_cross(cross, name + " cross-wavelet power"));
            artifacts[stem + "_coherence.svg"] =
                svg::heatmap(svg::from_coherence(coh, cross, &thr, name + " wavelet coherence"));
            return 0;
        });
    }

    RunManifest manifest;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [file, content] : artifacts) {
        outputs.push_back({{"file", file}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
        manifest.files.push_back(file);
    }
    manifest.document = {{"tool", "tsdecomp"},
                         {"manifest_version", 1},
                         {"seed", config.seed},
                         {"config", config.to_json()},
                         {"inputs", inputs_doc},
                         {"outputs", outputs}};

    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir);
        artifacts["manifest.json"] = manifest.text();
        for (const auto& [file, content] : artifacts) {
            const fs::path p = dir / file;
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            if (!out) throw_data("stage 'write': cannot create '" + p.string() + "'");
            written.push_back(p);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            if (!out) throw_data("stage 'write': failed writing '" + p.string() + "'");
        }
    } catch (const fs::filesystem_error& e) {
        for (const auto& p : written) fs::remove(p);
        throw_data(std::string("stage 'write': ") + e.what());
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
    return manifest;
}

} // namespace tsdecomp
