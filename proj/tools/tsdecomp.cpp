// tsdecomp command-line front end.
//
// Exit codes: 0 success, 2 configuration / parameter error, 3 data error,
// 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsdecomp/pipeline.hpp"
#include "tsdecomp/tsdecomp.hpp"

namespace {

using namespace tsdecomp;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Parameter: return kExitConfig;
    case ErrorKind::Data: return kExitData;
    case ErrorKind::Degenerate: return kExitNumeric;
    }
    return kExitNumeric;
}

/// Writes `content` to `path` ("-" for stdout); removes the file if the write fails.
void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot create output file '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
        throw_data("failed writing output file '" + path + "'");
    }
}

struct SeriesSource {
    std::string path;
    std::string schema = "two_column";
    std::string label;
    std::size_t min_records = 1;

    void attach(CLI::App* cmd, const char* flag = "--input,-i") {
        cmd->add_option(flag, path, "input CSV file")->required();
        cmd->add_option("--schema", schema, "column schema: two_column, fao, silso_monthly, silso_daily")
            ->capture_default_str();
        cmd->add_option("--label", label, "series label");
        cmd->add_option("--min-records", min_records, "minimum non-missing records per year")
            ->capture_default_str();
    }

    [[nodiscard]] AnnualSeries load() const {
        const auto records = parse_csv(read_text_file(path), ColumnSchema::by_name(schema));
        auto s = annualize(records, MeanPolicy{min_records}, label.empty() ? path : label);
        s.validate();
        return s;
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    return flag ? *flag : seed_from_env(fallback);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tsdecomp: trend / cycle / noise decomposition and wavelet analysis of annual series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tsdecomp 1.0.0");

    // ingest
    SeriesSource ingest_src;
    std::string ingest_out = "-";
    auto* ingest = app.add_subcommand("ingest", "parse a CSV and aggregate it to annual means");
    ingest_src.attach(ingest);
    ingest->add_option("--out,-o", ingest_out, "output CSV (year,value); '-' for stdout")->capture_default_str();

    // detrend
    SeriesSource detrend_src;
    std::string detrend_method = "spline", detrend_out = "-";
    double stiffness = 0.67, bass = 0.0;
    auto* detrend_cmd = app.add_subcommand("detrend", "split a series into trend and cycle");
    detrend_src.attach(detrend_cmd);
    detrend_cmd->add_option("--method", detrend_method, "spline or friedman")
        ->check(CLI::IsMember({"spline", "friedman"}))
        ->capture_default_str();
    detrend_cmd->add_option("--stiffness", stiffness, "spline 50% cutoff as a fraction of series length")
        ->capture_default_str();
    detrend_cmd->add_option("--bass", bass, "supersmoother bass enhancement in [0, 10]")->capture_default_str();
    detrend_cmd->add_option("--out,-o", detrend_out, "decomposition CSV")->capture_default_str();

    // test
    SeriesSource test_src;
    std::string variant_name = "no_drift_no_trend", test_out = "-";
    std::size_t keenan_order = 2, tsay_order = 2, mcleod_lags = 10;
    auto* test_cmd = app.add_subcommand("test", "stationarity and nonlinearity tests (JSON report)");
    test_src.attach(test_cmd);
    test_cmd->add_option("--variant", variant_name, "no_drift_no_trend, drift or drift_trend")
        ->check(CLI::IsMember({"no_drift_no_trend", "drift", "drift_trend"}))
        ->capture_default_str();
    test_cmd->add_option("--keenan-order", keenan_order, "AR order for Keenan's test")->capture_default_str();
    test_cmd->add_option("--tsay-order", tsay_order, "AR order for Tsay's test")->capture_default_str();
    test_cmd->add_option("--mcleod-lags", mcleod_lags, "lags for the McLeod-Li test")->capture_default_str();
    test_cmd->add_option("--out,-o", test_out, "JSON report")->capture_default_str();

    // emd
    SeriesSource emd_src;
    SiftConfig sift_cfg;
    std::string emd_out = "-", emd_denoise_out;
    auto* emd_cmd = app.add_subcommand("emd", "empirical mode decomposition");
    emd_src.attach(emd_cmd);
    emd_cmd->add_option("--epsilon", sift_cfg.epsilon, "sifting tolerance")->capture_default_str();
    emd_cmd->add_option("--max-imfs", sift_cfg.max_imfs, "maximum number of IMFs")->capture_default_str();
    emd_cmd->add_option("--max-sifts", sift_cfg.max_sifts, "maximum sifts per IMF")->capture_default_str();
    emd_cmd->add_option("--out,-o", emd_out, "IMF CSV (year, imf1..imfn, residual)")->capture_default_str();
    emd_cmd->add_option("--denoise-out", emd_denoise_out, "optional decomposition CSV with IMF 1 as noise");

    // ssa
    SeriesSource ssa_src;
    std::size_t ssa_window = 0;
    double ssa_threshold = 0.02;
    std::string ssa_out = "-", ssa_denoise_out;
    auto* ssa_cmd = app.add_subcommand("ssa", "singular spectrum analysis");
    ssa_src.attach(ssa_cmd);
    ssa_cmd->add_option("--window", ssa_window, "window length L (0 selects min(N/2, 25))")->capture_default_str();
    ssa_cmd->add_option("--threshold", ssa_threshold, "tail share treated as noise")->capture_default_str();
    ssa_cmd->add_option("--out,-o", ssa_out, "scree CSV")->capture_default_str();
    ssa_cmd->add_option("--denoise-out", ssa_denoise_out, "optional decomposition CSV with the tail as noise");

    // wavelet
    SeriesSource wv_src;
    double s0 = 2.0, dj = 0.05, omega0 = 6.0;
    std::string wv_csv = "-", wv_svg;
    auto* wv_cmd = app.add_subcommand("wavelet", "Morlet scalogram with AR(1) significance");
    wv_src.attach(wv_cmd);
    wv_cmd->add_option("--s0", s0, "smallest scale (years)")->capture_default_str();
    wv_cmd->add_option("--dj", dj, "scale resolution (octaves)")->capture_default_str();
    wv_cmd->add_option("--omega0", omega0, "Morlet centre frequency")->capture_default_str();
    wv_cmd->add_option("--csv", wv_csv, "long-format CSV")->capture_default_str();
    wv_cmd->add_option("--svg", wv_svg, "optional SVG heatmap");

    // xwavelet
    SeriesSource xa, xb;
    double xs0 = 2.0, xdj = 0.05, xomega0 = 6.0, cutoff = 0.0;
    std::size_t surrogates = 300;
    std::optional<std::uint64_t> x_seed;
    std::string x_csv = "-", x_svg_cross, x_svg_coh;
    auto* xw_cmd = app.add_subcommand("xwavelet", "cross-wavelet power and coherence of two series");
    xa.attach(xw_cmd, "--x");
    xw_cmd->add_option("--y", xb.path, "second input CSV")->required();
    xw_cmd->add_option("--s0", xs0, "smallest scale (years)")->capture_default_str();
    xw_cmd->add_option("--dj", xdj, "scale resolution (octaves)")->capture_default_str();
    xw_cmd->add_option("--omega0", xomega0, "Morlet centre frequency")->capture_default_str();
    xw_cmd->add_option("--surrogates", surrogates, "AR(1) surrogate pairs for coherence significance")
        ->capture_default_str();
    xw_cmd->add_option("--cutoff", cutoff, "zero cross power above this period (0 disables)")->capture_default_str();
    xw_cmd->add_option("--seed", x_seed, "random seed (overrides TSDECOMP_SEED)");
    xw_cmd->add_option("--csv", x_csv, "long-format CSV")->capture_default_str();
    xw_cmd->add_option("--svg-cross", x_svg_cross, "optional cross-power SVG");
    xw_cmd->add_option("--svg-coherence", x_svg_coh, "optional coherence SVG");

    // pipeline
    std::string config_path, output_dir;
    std::optional<std::uint64_t> p_seed;
    auto* pipe_cmd = app.add_subcommand("pipeline", "run the full analysis from a JSON config");
    pipe_cmd->add_option("--config,-c", config_path, "JSON run configuration")->required();
    pipe_cmd->add_option("--output-dir", output_dir, "override the configured output directory");
    pipe_cmd->add_option("--seed", p_seed, "random seed (overrides TSDECOMP_SEED and the config)");
    pipe_cmd->footer(
        "Config keys and defaults: inputs [{label, path, schema=two_column, unit}], min_records_per_year=1,\n"
        "detrend_method=spline, spline_stiffness=0.67, friedman_bass=0, test_variant=no_drift_no_trend,\n"
        "keenan_order=2, tsay_order=2, mcleod_lags=10, denoise=emd (emd|ssa|none), emd_epsilon=0.05,\n"
        "emd_max_imfs=10, emd_max_sifts=50, emd_skip=[], ssa_window=0 (min(N/2,25)), ssa_threshold=0.02,\n"
        "wavelet_s0=2, wavelet_dj=0.05, wavelet_omega0=6, pairs=[], coherence_surrogates=300,\n"
        "lowfreq_cutoff=0 (off), seed=20261015, output_dir=tsdecomp_out.\n"
        "Seed precedence: --seed, then TSDECOMP_SEED, then the config.");

    // synth
    std::string synth_kind = "tones", synth_out = "-";
    std::size_t synth_n = 51;
    int synth_start = 1967;
    std::vector<double> periods{11.0}, amplitudes, phases;
    double noise_sd = 0.0, alpha = 0.0;
    std::optional<std::uint64_t> s_seed;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic year,value fixture");
    synth_cmd->add_option("--kind", synth_kind, "tones, ar1, white or walk")
        ->check(CLI::IsMember({"tones", "ar1", "white", "walk"}))
        ->capture_default_str();
    synth_cmd->add_option("--n", synth_n, "number of years")->capture_default_str();
    synth_cmd->add_option("--start-year", synth_start, "first year")->capture_default_str();
    synth_cmd->add_option("--period", periods, "tone periods (years)")->capture_default_str();
    synth_cmd->add_option("--amplitude", amplitudes, "tone amplitudes (default 1 each)");
    synth_cmd->add_option("--phase", phases, "tone phases in radians (default 0 each)");
    synth_cmd->add_option("--noise", noise_sd, "Gaussian noise standard deviation")->capture_default_str();
    synth_cmd->add_option("--alpha", alpha, "AR(1) coefficient for --kind ar1")->capture_default_str();
    synth_cmd->add_option("--seed", s_seed, "random seed (overrides TSDECOMP_SEED)");
    synth_cmd->add_option("--out,-o", synth_out, "output CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*ingest) {
            write_output(ingest_out, csv::series(ingest_src.load()));
        } else if (*detrend_cmd) {
            DetrendConfig cfg;
            cfg.method = detrend_method == "spline" ? DetrendMethod::Spline : DetrendMethod::Friedman;
            cfg.spline_stiffness = stiffness;
            cfg.friedman_bass = bass;
            write_output(detrend_out, csv::decomposition(detrend(detrend_src.load(), cfg)));
        } else if (*test_cmd) {
            const auto s = test_src.load();
            RunConfig rc;
            rc.test_variant = variant_name;
            const auto v = rc.variant();
            nlohmann::json arr = nlohmann::json::array();
            arr.push_back(to_json(kpss_test(s.values, v)));
            arr.push_back(to_json(adf_test(s.values, v)));
            arr.push_back(to_json(keenan_test(s.values, keenan_order)));
            arr.push_back(to_json(tsay_test(s.values, tsay_order)));
            arr.push_back(to_json(mcleod_li_test(s.values, mcleod_lags)));
            write_output(test_out, arr.dump(2) + "\n");
        } else if (*emd_cmd) {
            const auto s = emd_src.load();
            const auto set = sift(s.values, sift_cfg);
            const std::string imf_csv = csv::imf_set(set, s.start_year);
            std::string denoised;
            if (!emd_denoise_out.empty()) denoised = csv::decomposition(denoise_first_imf(s, sift_cfg));
            write_output(emd_out, imf_csv);
            if (!emd_denoise_out.empty()) write_output(emd_denoise_out, denoised);
        } else if (*ssa_cmd) {
            const auto s = ssa_src.load();
            const std::size_t window = ssa_window ? ssa_window : default_window_length(s.values.size());
            const auto model = embed_decompose(s.values, window);
            std::string denoised;
            if (!ssa_denoise_out.empty()) denoised = csv::decomposition(denoise_low_eigen(s, window, ssa_threshold));
            write_output(ssa_out, csv::scree(scree(model)));
            if (!ssa_denoise_out.empty()) write_output(ssa_denoise_out, denoised);
        } else if (*wv_cmd) {
            const auto s = wv_src.load();
            const auto years = s.years();
            const std::vector<double> times(years.begin(), years.end());
            const auto sc = analyze_wavelet(s.values, ScaleGrid::for_length(s.values.size(), s0, dj), omega0, times);
            const std::string svg_text =
                wv_svg.empty() ? std::string() : svg::heatmap(svg::from_scalogram(sc, s.label + " wavelet power"));
            write_output(wv_csv, csv::scalogram(sc));
            if (!wv_svg.empty()) write_output(wv_svg, svg_text);
        } else if (*xw_cmd) {
            xb.schema = xa.schema;
            xb.min_records = xa.min_records;
            const auto a = xa.load();
            const auto b = xb.load();
            if (a.start_year != b.start_year || a.values.size() != b.values.size())
                throw_data("xwavelet: the two series must cover the same years");
            const auto years = a.years();
            const std::vector<double> times(years.begin(), years.end());
            const auto grid = ScaleGrid::for_length(a.values.size(), xs0, xdj);
            const MorletPlan plan(a.values.size(), grid, xomega0);
            const auto wa = plan.transform(a.values, times);
            const auto wb = plan.transform(b.values, times);
            const auto ma = fit_ar1(a.values);
            const auto mb = fit_ar1(b.values);
            auto cross = cross_wavelet(wa, wb, ma, mb, a.label, b.label);
            if (cutoff > 0.0) cross = dump_lowfreq_mask(cross, cutoff);
            const auto coh = coherence(wa, wb);
            const SeededStream stream(resolve_seed(x_seed, RunConfig{}.seed));
            const auto thr = coherence_threshold(a.values.size(), grid, xomega0, ma, mb, stream, {}, surrogates);
            const std::string name = a.label + " ~ " + b.label;
            const std::string cross_svg =
                x_svg_cross.empty() ? std::string() : svg::heatmap(svg::from_cross(cross, name + " cross power"));
            const std::string coh_svg = x_svg_coh.empty()
                                            ? std::string()
                                            : svg::heatmap(svg::from_coherence(coh, cross, &thr, name + " coherence"));
            write_output(x_csv, csv::cross(cross, &coh, &thr));
            if (!x_svg_cross.empty()) write_output(x_svg_cross, cross_svg);
            if (!x_svg_coh.empty()) write_output(x_svg_coh, coh_svg);
        } else if (*pipe_cmd) {
            auto cfg = load_config(config_path);
            cfg.seed = resolve_seed(p_seed, cfg.seed);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            const auto manifest = run_pipeline(cfg);
            std::cout << "wrote " << manifest.files.size() << " artifacts and manifest.json to " << cfg.output_dir
                      << "\n";
        } else if (*synth_cmd) {
            if (synth_n < 1) throw_parameter("synth: --n must be positive");
            SeededStream stream(resolve_seed(s_seed, RunConfig{}.seed));
            std::vector<double> values;
            if (synth_kind == "tones") {
                std::vector<Tone> tones;
                for (std::size_t i = 0; i < periods.size(); ++i)
                    tones.push_back({periods[i], i < amplitudes.size() ? amplitudes[i] : 1.0,
                                     i < phases.size() ? phases[i] : 0.0});
                values = gen_sum_of_tones(synth_n, tones, noise_sd, stream);
            } else if (synth_kind == "ar1") {
                values = gen_ar1(synth_n, alpha, noise_sd > 0.0 ? noise_sd : 1.0, stream);
            } else if (synth_kind == "white") {
                values = gen_white_noise(synth_n, noise_sd > 0.0 ? noise_sd : 1.0, stream);
            } else {
                values = gen_random_walk(synth_n, noise_sd > 0.0 ? noise_sd : 1.0, stream);
            }
            AnnualSeries s;
            s.start_year = synth_start;
            s.values = std::move(values);
            write_output(synth_out, csv::series(s));
        }
    } catch (const Error& e) {
        std::cerr << "tsdecomp: error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "tsdecomp: error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "tsdecomp: error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
