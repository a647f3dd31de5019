#pragma once

// Static SVG 1.1 heatmaps for scalograms and cross spectra: log2-period axis,
// hatched cone of influence, marching-squares significance contours, legend.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tsdecomp/error.hpp"
#include "tsdecomp/io.hpp"

namespace tsdecomp::svg {

using Mask = std::vector<std::vector<bool>>;

struct HeatmapInput {
    std::string title;
    std::vector<std::vector<double>> values;  ///< [row][col]; rows are log-spaced periods
    std::vector<double> times;                ///< one per column
    std::vector<double> periods;              ///< one per row, increasing
    std::vector<double> coi_period;           ///< optional, one per column
    std::optional<Mask> sig90;                ///< drawn as black contours
    std::optional<Mask> sig95;                ///< drawn as white contours
    std::optional<std::vector<std::vector<double>>> phase;  ///< radians, arrows every `arrow_stride` cells
    std::size_t arrow_stride = 4;
    std::optional<Mask> arrow_mask;  ///< arrows only where true (e.g. significant)
};

namespace detail {

// Perceptually ordered ramp, sampled from viridis at nine evenly spaced stops.
inline constexpr std::array<std::array<int, 3>, 9> kRamp = {{{68, 1, 84},
                                                              {71, 44, 122},
                                                              {59, 81, 139},
                                                              {44, 113, 142},
                                                              {33, 144, 141},
                                                              {39, 173, 129},
                                                              {92, 200, 99},
                                                              {170, 220, 50},
                                                              {253, 231, 37}}};

inline std::string ramp_color(double u) {
    u = std::clamp(std::isfinite(u) ? u : 0.0, 0.0, 1.0) * (kRamp.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(u), kRamp.size() - 2);
    const double f = u - static_cast<double>(i);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<int>(std::lround((1.0 - f) * kRamp[i][c] + f * kRamp[i + 1][c]));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Segment {
    double x0, y0, x1, y1;  ///< in (column, row) index coordinates
};

/// Marching squares over cell centres. Only edges between cells produce
/// segments, so a uniform mask yields none.
inline std::vector<Segment> contour_segments(const Mask& m) {
    std::vector<Segment> segs;
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    if (rows < 2 || cols < 2) return segs;
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            const int tl = m[r][c], tr = m[r][c + 1], br = m[r + 1][c + 1], bl = m[r + 1][c];
            const int code = tl << 3 | tr << 2 | br << 1 | bl;
            if (code == 0 || code == 15) continue;
            const double x = static_cast<double>(c), y = static_cast<double>(r);
            // Edge midpoints: top, right, bottom, left.
            const double tx = x + 0.5, ty = y, rx = x + 1.0, ry = y + 0.5;
            const double bx = x + 0.5, by = y + 1.0, lx = x, ly = y + 0.5;
            auto add = [&](double a, double b, double c2, double d) { segs.push_back({a, b, c2, d}); };
            switch (code) {
            case 1: case 14: add(lx, ly, bx, by); break;
            case 2: case 13: add(bx, by, rx, ry); break;
            case 3: case 12: add(lx, ly, rx, ry); break;
            case 4: case 11: add(tx, ty, rx, ry); break;
            case 6: case 9: add(tx, ty, bx, by); break;
            case 7: case 8: add(lx, ly, tx, ty); break;
            case 5:
                add(lx, ly, tx, ty);
                add(bx, by, rx, ry);
                break;
            case 10:
                add(tx, ty, rx, ry);
                add(lx, ly, bx, by);
                break;
            default: break;
            }
        }
    }
    return segs;
}

inline std::vector<double> nice_ticks(double lo, double hi, int target) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
}

} // namespace detail

/// Renders the heatmap. Output depends only on the input, so identical input gives identical bytes.
inline std::string heatmap(const HeatmapInput& in) {
    const std::size_t rows = in.values.size();
    const std::size_t cols = rows ? in.values[0].size() : 0;
    if (rows == 0 || cols == 0) throw_parameter("svg heatmap: empty matrix");
    if (in.times.size() != cols || in.periods.size() != rows) throw_parameter("svg heatmap: axis length mismatch");
    for (const auto& row : in.values) {
        if (row.size() != cols) throw_parameter("svg heatmap: ragged matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw_parameter("svg heatmap: matrix must be finite");
    }

    constexpr double W = 760, H = 440, left = 70, right = 110, top = 36, bottom = 52;
    const double pw = W - left - right, ph = H - top - bottom;
    const double cw = pw / static_cast<double>(cols), ch = ph / static_cast<double>(rows);
    // Index coordinates (column, row) of cell centres map to pixel centres.
    auto px = [&](double c) { return left + (c + 0.5) * cw; };
    auto py = [&](double r) { return top + (r + 0.5) * ch; };
    const double lp0 = std::log2(in.periods.front());
    const double dlp = rows > 1 ? (std::log2(in.periods.back()) - lp0) / static_cast<double>(rows - 1) : 1.0;
    auto row_of_period = [&](double p) { return (std::log2(p) - lp0) / dlp; };

    double vmin = in.values[0][0], vmax = vmin;
    for (const auto& row : in.values)
        for (double v : row) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    const double vspan = vmax - vmin;

    std::string s;
    s.reserve(rows * cols * 90 + 4096);
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + detail::num(W) + "\" height=\"" +
         detail::num(H) + "\" viewBox=\"0 0 " + detail::num(W) + ' ' + detail::num(H) + "\">\n";
    s += "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\">"
         "<path d=\"M0,6 L6,0\" stroke=\"#ffffff\" stroke-width=\"1\"/></pattern>"
         "<clipPath id=\"plot\"><rect x=\"" +
         detail::num(left) + "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(pw) + "\" height=\"" +
         detail::num(ph) + "\"/></clipPath></defs>\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(W) + "\" height=\"" + detail::num(H) + "\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + detail::num(left) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" +
         detail::escape(in.title) + "</text>\n";

    s += "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double u = vspan > 0.0 ? (in.values[r][c] - vmin) / vspan : 0.5;
            s += "<rect x=\"" + detail::num(left + c * cw) + "\" y=\"" + detail::num(top + r * ch) + "\" width=\"" +
                 detail::num(cw + 0.05) + "\" height=\"" + detail::num(ch + 0.05) + "\" fill=\"" +
                 detail::ramp_color(u) + "\"/>\n";
        }
    s += "</g>\n";

    if (!in.coi_period.empty()) {
        if (in.coi_period.size() != cols) throw_parameter("svg heatmap: coi length mismatch");
        const double bottom_y = top + ph;
        std::string d = "M" + detail::num(left) + ',' + detail::num(bottom_y);
        for (std::size_t c = 0; c < cols; ++c) {
            const double p = std::max(in.coi_period[c], 1e-12);
            const double r = std::clamp(row_of_period(p), -0.5, static_cast<double>(rows) - 0.5);
            d += " L" + detail::num(px(static_cast<double>(c))) + ',' + detail::num(py(r));
        }
        d += " L" + detail::num(left + pw) + ',' + detail::num(bottom_y) + " Z";
        s += "<path d=\"" + d + "\" fill=\"url(#hatch)\" fill-opacity=\"0.8\" stroke=\"#ffffff\" stroke-width=\"1\" "
             "clip-path=\"url(#plot)\"/>\n";
    }

    auto contours = [&](const Mask& m, const char* color) {
        if (m.size() != rows || m[0].size() != cols) throw_parameter("svg heatmap: mask shape mismatch");
        const auto segs = detail::contour_segments(m);
        if (segs.empty()) return;
        std::string d;
        for (const auto& g : segs)
            d += "M" + detail::num(px(g.x0)) + ',' + detail::num(py(g.y0)) + " L" + detail::num(px(g.x1)) + ',' +
                 detail::num(py(g.y1)) + ' ';
        d.pop_back();
        s += "<path class=\"contour\" d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    };
    if (in.sig90) contours(*in.sig90, "#000000");
    if (in.sig95) contours(*in.sig95, "#ffffff");

    if (in.phase && in.arrow_stride > 0) {
        const auto& ph_m = *in.phase;
        const double len = 0.4 * std::min(cw * static_cast<double>(in.arrow_stride), 18.0);
        s += "<g stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
        for (std::size_t r = in.arrow_stride / 2; r < rows; r += in.arrow_stride)
            for (std::size_t c = in.arrow_stride / 2; c < cols; c += in.arrow_stride) {
                if (in.arrow_mask && !(*in.arrow_mask)[r][c]) continue;
                const double a = ph_m[r][c];
                const double x0 = px(static_cast<double>(c)), y0 = py(static_cast<double>(r));
                // In-phase points right; angles increase anticlockwise on screen.
                const double x1 = x0 + len * std::cos(a), y1 = y0 - len * std::sin(a);
                const double hx = x1 - 0.4 * len * std::cos(a - 0.5), hy = y1 + 0.4 * len * std::sin(a - 0.5);
                const double kx = x1 - 0.4 * len * std::cos(a + 0.5), ky = y1 + 0.4 * len * std::sin(a + 0.5);
                s += "<path d=\"M" + detail::num(x0) + ',' + detail::num(y0) + " L" + detail::num(x1) + ',' +
                     detail::num(y1) + " M" + detail::num(hx) + ',' + detail::num(hy) + " L" + detail::num(x1) + ',' +
                     detail::num(y1) + " L" + detail::num(kx) + ',' + detail::num(ky) + "\"/>\n";
            }
        s += "</g>\n";
    }

    // Axes.
    s += "<rect x=\"" + detail::num(left) + "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(pw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    const double t0 = in.times.front(), t1 = in.times.back();
    const double tspan = cols > 1 ? t1 - t0 : 1.0;
    for (double tick : detail::nice_ticks(t0, t1, 8)) {
        const double c = cols > 1 ? (tick - t0) / tspan * static_cast<double>(cols - 1) : 0.0;
        const double x = px(c);
        s += "<line x1=\"" + detail::num(x) + "\" y1=\"" + detail::num(top + ph) + "\" x2=\"" + detail::num(x) +
             "\" y2=\"" + detail::num(top + ph + 5) + "\" stroke=\"#000000\"/>";
        s += "<text x=\"" + detail::num(x) + "\" y=\"" + detail::num(top + ph + 18) +
             "\" text-anchor=\"middle\">" + format_number(tick) + "</text>\n";
    }
    s += "<text x=\"" + detail::num(left + pw / 2) + "\" y=\"" + detail::num(H - 12) +
         "\" text-anchor=\"middle\">year</text>\n";
    const double pmin = in.periods.front(), pmax = in.periods.back();
    for (double e = std::ceil(std::log2(pmin) - 1e-9); e <= std::log2(pmax) + 1e-9; e += 1.0) {
        const double y = py(row_of_period(std::exp2(e)));
        s += "<line x1=\"" + detail::num(left - 5) + "\" y1=\"" + detail::num(y) + "\" x2=\"" + detail::num(left) +
             "\" y2=\"" + detail::num(y) + "\" stroke=\"#000000\"/>";
        s += "<text x=\"" + detail::num(left - 8) + "\" y=\"" + detail::num(y + 4) + "\" text-anchor=\"end\">" +
             format_number(std::exp2(e)) + "</text>\n";
    }
    s += "<text transform=\"translate(18," + detail::num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">period (years, log2)</text>\n";

    // Legend bar.
    const double lx = left + pw + 24, lw = 16;
    constexpr int steps = 32;
    for (int i = 0; i < steps; ++i) {
        const double u = 1.0 - (i + 0.5) / steps;
        s += "<rect x=\"" + detail::num(lx) + "\" y=\"" + detail::num(top + i * ph / steps) + "\" width=\"" +
             detail::num(lw) + "\" height=\"" + detail::num(ph / steps + 0.05) + "\" fill=\"" +
             detail::ramp_color(u) + "\"/>\n";
    }
    s += "<rect x=\"" + detail::num(lx) + "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(lw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    s += "<text x=\"" + detail::num(lx + lw + 4) + "\" y=\"" + detail::num(top + 8) + "\">" +
         detail::escape(format_number(vmax)) + "</text>\n";
    s += "<text x=\"" + detail::num(lx + lw + 4) + "\" y=\"" + detail::num(top + ph) + "\">" +
         detail::escape(format_number(vmin)) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

inline HeatmapInput from_scalogram(const Scalogram& sc, std::string title) {
    HeatmapInput in;
    in.title = std::move(title);
    in.values = sc.power;
    in.times = sc.times;
    for (std::size_t j = 0; j < sc.n_scales(); ++j) in.periods.push_back(sc.period(j));
    const double factor = morlet_fourier_factor(sc.omega0);
    for (double c : sc.coi) in.coi_period.push_back(c * factor);
    if (!sc.sig90.empty()) in.sig90 = sc.sig90;
    if (!sc.sig95.empty()) in.sig95 = sc.sig95;
    return in;
}

inline HeatmapInput from_cross(const CrossScalogram& c, std::string title) {
    HeatmapInput in;
    in.title = std::move(title);
    in.values = c.power;
    in.times = c.times;
    for (std::size_t j = 0; j < c.n_scales(); ++j) in.periods.push_back(c.period(j));
    const double factor = morlet_fourier_factor(c.omega0);
    for (double v : c.coi) in.coi_period.push_back(v * factor);
    in.sig95 = c.sig95;
    in.phase = c.phase;
    in.arrow_mask = c.sig95;
    return in;
}

inline HeatmapInput from_coherence(const CoherenceMap& m, const CrossScalogram& c,
                                   const std::vector<std::vector<double>>* threshold, std::string title) {
    HeatmapInput in;
    in.title = std::move(title);
    in.values = m.r2;
    in.times = m.times;
    for (std::size_t j = 0; j < m.grid.scales.size(); ++j) in.periods.push_back(c.period(j));
    const double factor = morlet_fourier_factor(m.omega0);
    for (double v : m.coi) in.coi_period.push_back(v * factor);
    if (threshold) {
        Mask sig(m.r2.size(), std::vector<bool>(m.times.size()));
        for (std::size_t j = 0; j < sig.size(); ++j)
            for (std::size_t t = 0; t < sig[j].size(); ++t) sig[j][t] = m.r2[j][t] > (*threshold)[j][t];
        in.sig95 = sig;
        in.arrow_mask = sig;
    }
    in.phase = c.phase;
    return in;
}

} // namespace tsdecomp::svg
