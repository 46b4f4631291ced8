//==============================================================================
// svg.hpp
// Minimal self-contained SVG emission for the command line tool: line plots,
// scatter plots, and space-time heatmaps. No external plotting dependency.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace svgplot {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    std::string label;
};

namespace detail {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        } else {
            const double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

inline std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

} // namespace detail

// Shared frame: axes box, tick labels, title; the draw callback receives the
// coordinate mapping.
template <typename Draw>
void write_framed(const std::string& path, const std::string& title, detail::Range xr,
                  detail::Range yr, Draw&& draw) {
    const int W = 860, H = 560, ml = 70, mr = 20, mt = 40, mb = 50;
    xr.pad();
    yr.pad();
    auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - yr.lo) / (yr.hi - yr.lo) * (H - mt - mb); };

    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16' "
           "font-family='sans-serif'>"
        << title << "</text>\n";
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
        << H - mt - mb << "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xr.lo + i * (xr.hi - xr.lo) / 4;
        const double yv = yr.lo + i * (yr.hi - yr.lo) / 4;
        out << "<text x='" << px(xv) << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
            << detail::fmt(xv) << "</text>\n";
        out << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << detail::fmt(yv)
            << "</text>\n";
    }
    draw(out, px, py);
    out << "</svg>\n";
}

inline void write_lines(const std::string& path, const std::string& title,
                        const std::vector<Series>& series) {
    detail::Range xr, yr;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.absorb(s.x[i]);
            yr.absorb(s.y[i]);
        }
    write_framed(path, title, xr, yr, [&](std::ofstream& out, auto px, auto py) {
        int legend_y = 56;
        for (const auto& s : series) {
            out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << "," << py(s.y[i]) << " ";
            out << "'/>\n";
            if (!s.label.empty()) {
                out << "<text x='740' y='" << legend_y << "' font-size='12' fill='" << s.color
                    << "' font-family='sans-serif'>" << s.label << "</text>\n";
                legend_y += 16;
            }
        }
    });
}

inline void write_scatter(const std::string& path, const std::string& title,
                          const std::vector<Series>& series) {
    detail::Range xr, yr;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.absorb(s.x[i]);
            yr.absorb(s.y[i]);
        }
    write_framed(path, title, xr, yr, [&](std::ofstream& out, auto px, auto py) {
        int legend_y = 56;
        for (const auto& s : series) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
                    << "' r='2.5' fill='" << s.color << "' fill-opacity='0.7'/>\n";
            if (!s.label.empty()) {
                out << "<text x='740' y='" << legend_y << "' font-size='12' fill='" << s.color
                    << "' font-family='sans-serif'>" << s.label << "</text>\n";
                legend_y += 16;
            }
        }
    });
}

// rows[i][j] = value at time t_i, position x_j; blue-white-red diverging map.
inline void write_heatmap(const std::string& path, const std::string& title,
                          const std::vector<double>& xs, const std::vector<double>& ts,
                          const std::vector<std::vector<double>>& rows) {
    const int W = 860, H = 560, ml = 70, mr = 20, mt = 40, mb = 50;
    double vmax = 0.0;
    for (const auto& r : rows)
        for (double v : r) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;

    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16' "
           "font-family='sans-serif'>"
        << title << "</text>\n";
    const double cw = double(W - ml - mr) / xs.size();
    const double ch = double(H - mt - mb) / rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double v = rows[i][j] / vmax;  // [-1, 1]
            const int r = int(255 * std::min(1.0, 1.0 + std::min(v, 0.0)));
            const int b = int(255 * std::min(1.0, 1.0 - std::max(v, 0.0)));
            const int g = int(255 * (1.0 - std::abs(v)));
            out << "<rect x='" << ml + j * cw << "' y='" << H - mb - (i + 1) * ch << "' width='"
                << cw + 0.5 << "' height='" << ch + 0.5 << "' fill='rgb(" << r << "," << g << ","
                << b << ")'/>\n";
        }
    }
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
        << H - mt - mb << "' fill='none' stroke='#444'/>\n";
    out << "<text x='" << W / 2 << "' y='" << H - 14
        << "' text-anchor='middle' font-size='12' font-family='sans-serif'>x from "
        << detail::fmt(xs.front()) << " to " << detail::fmt(xs.back()) << ", t from "
        << detail::fmt(ts.front()) << " to " << detail::fmt(ts.back()) << ", |max| = "
        << detail::fmt(vmax) << "</text>\n";
    out << "</svg>\n";
}

} // namespace svgplot
