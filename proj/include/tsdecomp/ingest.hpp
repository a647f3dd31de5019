#pragma once

// Delimited-text ingestion and aggregation of sub-annual records to yearly means.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsdecomp/error.hpp"
#include "tsdecomp/series.hpp"

namespace tsdecomp {

struct RawRecord {
    int year = 0;
    std::optional<int> month;
    std::optional<double> value;  ///< nullopt marks a missing observation
    std::optional<std::string> quality_flag;
    std::size_t line = 0;
};

/// A column is addressed either by zero-based index or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnSchema {
    std::string name;
    ColumnRef year_column = std::size_t{0};
    std::optional<ColumnRef> month_column;
    ColumnRef value_column = std::size_t{1};
    std::optional<ColumnRef> quality_column;
    bool has_header = true;
    /// Values equal to this sentinel are treated as missing (e.g. -1 in SILSO files).
    std::optional<double> missing_sentinel;

    /// year,value with one header row.
    static ColumnSchema two_column() {
        ColumnSchema s;
        s.name = "two_column";
        return s;
    }

    /// FAOSTAT bulk export: columns located by the "Year" and "Value" headers.
    static ColumnSchema fao() {
        ColumnSchema s;
        s.name = "fao";
        s.year_column = std::string("Year");
        s.value_column = std::string("Value");
        s.quality_column = std::string("Flag");
        return s;
    }

    /// SILSO monthly mean total sunspot number: year;month;decimal date;value;sd;nobs;provisional.
    static ColumnSchema silso_monthly() {
        ColumnSchema s;
        s.name = "silso_monthly";
        s.year_column = std::size_t{0};
        s.month_column = std::size_t{1};
        s.value_column = std::size_t{3};
        s.has_header = false;
        s.missing_sentinel = -1.0;
        return s;
    }

    /// SILSO daily total sunspot number: year;month;day;decimal date;value;sd;nobs;provisional.
    static ColumnSchema silso_daily() {
        ColumnSchema s = silso_monthly();
        s.name = "silso_daily";
        s.value_column = std::size_t{4};
        return s;
    }

    static ColumnSchema by_name(std::string_view name) {
        if (name == "two_column") return two_column();
        if (name == "fao") return fao();
        if (name == "silso_monthly") return silso_monthly();
        if (name == "silso_daily") return silso_daily();
        throw_parameter("unknown column schema '" + std::string(name) + "'");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// Splits one line into fields, honouring double-quoted fields with "" escapes.
inline std::vector<std::string> split_fields(std::string_view line, char delim, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && trim(cur).empty()) {
            cur.clear();
            in_quotes = true;
            was_quoted = true;
        } else if (c == delim) {
            fields.emplace_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) throw_data("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.emplace_back(was_quoted ? cur : std::string(trim(cur)));
    return fields;
}

/// Semicolon when the first row has more semicolons than commas, otherwise comma.
inline char detect_delimiter(std::string_view first_line) {
    const auto commas = std::count(first_line.begin(), first_line.end(), ',');
    const auto semis = std::count(first_line.begin(), first_line.end(), ';');
    return semis > commas ? ';' : ',';
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline bool is_missing_marker(std::string_view s) {
    s = trim(s);
    return s.empty() || s == "NA";
}

inline std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string>& header) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) return *idx;
    const auto& name = std::get<std::string>(ref);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == name) return i;
    throw_data("header has no column named '" + name + "'");
}

} // namespace detail

/// Parses delimiter-separated text (comma or semicolon, detected from the first row).
inline std::vector<RawRecord> parse_csv(std::string_view text, const ColumnSchema& schema) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    // UTF-8 byte order mark.
    if (!lines.empty() && lines[0].starts_with("\xEF\xBB\xBF")) lines[0].remove_prefix(3);

    std::size_t first = 0;
    while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
    if (first == lines.size()) return {};
    const char delim = detail::detect_delimiter(lines[first]);

    std::vector<std::string> header;
    std::size_t data_start = first;
    if (schema.has_header) {
        header = detail::split_fields(lines[first], delim, first + 1);
        data_start = first + 1;
    }
    const std::size_t year_col = detail::resolve_column(schema.year_column, header);
    const std::size_t value_col = detail::resolve_column(schema.value_column, header);
    const std::optional<std::size_t> month_col =
        schema.month_column ? std::optional(detail::resolve_column(*schema.month_column, header)) : std::nullopt;
    std::optional<std::size_t> quality_col;
    if (schema.quality_column) {
        // Optional column: silently absent when looked up by a name the header lacks.
        try {
            quality_col = detail::resolve_column(*schema.quality_column, header);
        } catch (const Error&) {
            quality_col.reset();
        }
    }

    std::vector<RawRecord> out;
    for (std::size_t i = data_start; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_fields(lines[i], delim, line_no);
        const std::size_t needed = std::max({year_col, value_col, month_col.value_or(0)}) + 1;
        if (fields.size() < needed)
            throw_data("line " + std::to_string(line_no) + ": expected at least " + std::to_string(needed) +
                       " fields, found " + std::to_string(fields.size()));

        RawRecord rec;
        rec.line = line_no;
        const auto year = detail::parse_int(fields[year_col]);
        if (!year) throw_data("line " + std::to_string(line_no) + ": unparseable year '" + fields[year_col] + "'");
        rec.year = *year;
        if (month_col) {
            const auto month = detail::parse_int(fields[*month_col]);
            if (!month || *month < 1 || *month > 12)
                throw_data("line " + std::to_string(line_no) + ": unparseable month '" + fields[*month_col] + "'");
            rec.month = *month;
        }
        if (!detail::is_missing_marker(fields[value_col])) {
            const auto v = detail::parse_double(fields[value_col]);
            if (!v || !std::isfinite(*v))
                throw_data("line " + std::to_string(line_no) + ": unparseable value '" + fields[value_col] + "'");
            if (!(schema.missing_sentinel && *v == *schema.missing_sentinel)) rec.value = *v;
        }
        if (quality_col && *quality_col < fields.size() && !fields[*quality_col].empty())
            rec.quality_flag = fields[*quality_col];
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct MeanPolicy {
    /// Minimum number of non-missing records a year needs to count as covered.
    std::size_t min_records_per_year = 1;
};

/// One arithmetic mean per calendar year over non-missing records; gaps are errors.
inline AnnualSeries annualize(const std::vector<RawRecord>& records, const MeanPolicy& policy = {},
                              std::string label = {}, std::string unit = {}) {
    std::map<int, std::vector<double>> per_year;
    for (const auto& r : records) {
        auto& bucket = per_year[r.year];
        if (r.value) bucket.push_back(*r.value);
    }
    const auto& seen = per_year;
    if (seen.size() < AnnualSeries::kMinLength)
        throw_data("annualize: records span " + std::to_string(seen.size()) + " distinct years, need at least 8");

    const int first = seen.begin()->first;
    const int last = seen.rbegin()->first;
    AnnualSeries s;
    s.start_year = first;
    s.label = std::move(label);
    s.unit = std::move(unit);
    s.values.reserve(static_cast<std::size_t>(last - first + 1));
    for (int y = first; y <= last; ++y) {
        const auto it = per_year.find(y);
        if (it == per_year.end() || it->second.empty() ||
            it->second.size() < policy.min_records_per_year)
            throw_data("annualize: no usable records for year " + std::to_string(y));
        // Sorted summation makes the mean independent of record order.
        auto vals = it->second;
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (double v : vals) sum += v;
        s.values.push_back(sum / static_cast<double>(vals.size()));
    }
    return s;
}

} // namespace tsdecomp
