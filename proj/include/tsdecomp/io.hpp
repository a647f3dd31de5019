#pragma once

// Serialization of module results: CSV tables and JSON test reports.
// Numbers are written with std::to_chars so output is byte-stable.

#include <charconv>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsdecomp/emd.hpp"
#include "tsdecomp/series.hpp"
#include "tsdecomp/spectral.hpp"
#include "tsdecomp/ssa.hpp"
#include "tsdecomp/stattests.hpp"
#include "tsdecomp/wavelet.hpp"
#include "tsdecomp/xwavelet.hpp"

namespace tsdecomp {

/// Shortest round-trip representation; "nan" / "inf" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed-point with `digits` decimals.
inline std::string format_fixed(double v, int digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    // Avoid "-0.00".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline nlohmann::json to_json(const TestReport& r) {
    return {{"test", r.test_name},
            {"statistic", r.statistic},
            {"p_kind", to_string(r.p_value.kind)},
            {"p_value", r.p_value.value},
            {"variant", to_string(r.model_variant)},
            {"lag", r.lag},
            {"null_hypothesis", r.null_hypothesis}};
}

namespace csv {

inline std::string decomposition(const Decomposition& d) {
    std::string out = "year,source,trend,cycle,noise\n";
    for (std::size_t t = 0; t < d.source.values.size(); ++t) {
        out += std::to_string(d.source.start_year + static_cast<int>(t));
        for (double v : {d.source.values[t], d.trend[t], d.cycle[t], d.noise[t]}) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

inline std::string series(const AnnualSeries& s) {
    std::string out = "year,value\n";
    for (std::size_t t = 0; t < s.values.size(); ++t)
        out += std::to_string(s.start_year + static_cast<int>(t)) + ',' + format_number(s.values[t]) + '\n';
    return out;
}

/// Columns year, imf1..imfn, residual.
inline std::string imf_set(const ImfSet& set, int start_year) {
    std::string out = "year";
    for (std::size_t j = 0; j < set.size(); ++j) out += ",imf" + std::to_string(j + 1);
    out += ",residual\n";
    for (std::size_t t = 0; t < set.residual.size(); ++t) {
        out += std::to_string(start_year + static_cast<int>(t));
        for (const auto& h : set.imfs) out += ',' + format_number(h[t]);
        out += ',' + format_number(set.residual[t]) + '\n';
    }
    return out;
}

/// Columns frequency, period (years), power.
inline std::string periodogram(const Periodogram& p) {
    std::string out = "frequency,period_years,power\n";
    for (std::size_t k = 0; k < p.power.size(); ++k)
        out += format_number(p.frequencies[k]) + ',' + format_number(1.0 / p.frequencies[k]) + ',' +
               format_number(p.power[k]) + '\n';
    return out;
}

inline std::string scree(std::span<const double> shares) {
    std::string out = "component,share\n";
    for (std::size_t i = 0; i < shares.size(); ++i)
        out += std::to_string(i + 1) + ',' + format_number(shares[i]) + '\n';
    return out;
}

/// Long format: year, scale, period_years, power, sig90, sig95, in_coi.
inline std::string scalogram(const Scalogram& sc) {
    std::string out = "year,scale,period_years,power,sig90,sig95,in_coi\n";
    const auto trusted = coi_mask(sc);
    for (std::size_t j = 0; j < sc.n_scales(); ++j) {
        const std::string scale = format_number(sc.grid.scales[j]);
        const std::string period = format_number(sc.period(j));
        for (std::size_t t = 0; t < sc.n_times(); ++t) {
            out += format_number(sc.times[t]) + ',' + scale + ',' + period + ',' + format_number(sc.power[j][t]);
            out += sc.sig90.empty() ? ",0" : sc.sig90[j][t] ? ",1" : ",0";
            out += sc.sig95.empty() ? ",0" : sc.sig95[j][t] ? ",1" : ",0";
            out += trusted[j][t] ? ",0\n" : ",1\n";
        }
    }
    return out;
}

/// Long format: year, scale, period_years, cross_power, phase, coherence, coherence_sig95, sig95, in_coi.
inline std::string cross(const CrossScalogram& c, const CoherenceMap* coh,
                         const std::vector<std::vector<double>>* coh_threshold) {
    std::string out = "year,scale,period_years,cross_power,phase,coherence,coherence_sig95,sig95,in_coi\n";
    for (std::size_t j = 0; j < c.n_scales(); ++j) {
        const std::string scale = format_number(c.grid.scales[j]);
        const std::string period = format_number(c.period(j));
        for (std::size_t t = 0; t < c.n_times(); ++t) {
            out += format_number(c.times[t]) + ',' + scale + ',' + period + ',' + format_number(c.power[j][t]) + ',' +
                   format_number(c.phase[j][t]) + ',';
            out += coh ? format_number(coh->r2[j][t]) : std::string("nan");
            out += coh && coh_threshold ? (coh->r2[j][t] > (*coh_threshold)[j][t] ? ",1" : ",0") : ",0";
            out += c.sig95[j][t] ? ",1" : ",0";
            out += c.grid.scales[j] < c.coi[t] ? ",0\n" : ",1\n";
        }
    }
    return out;
}

} // namespace csv
} // namespace tsdecomp
