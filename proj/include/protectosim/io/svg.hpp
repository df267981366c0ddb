#pragma once

// Minimal self-contained SVG line plots: axes, ticks, polyline series and a
// legend.  CSV is the authoritative output format; this is a convenience
// rendering with deterministic bytes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>

#include "protectosim/io/curves.hpp"

namespace protectosim::io {

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace detail

inline void write_curves_svg(const std::filesystem::path& path, const CurveSet& curves) {
    curves.validate();
    constexpr double width = 860, height = 540;
    constexpr double ml = 80, mr = 24, mt = 44, mb = 64;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    const double x_min = curves.x.front();
    const double x_max = curves.x.back();
    double y_min = curves.series.front().y.front();
    double y_max = y_min;
    for (const auto& s : curves.series)
        for (double v : s.y) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return mt + (y_max - y) / (y_max - y_min) * plot_h; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr int palette_size = 6;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"540\" "
           "viewBox=\"0 0 860 540\">\n";
    svg += "<rect width=\"860\" height=\"540\" fill=\"white\"/>\n";
    svg += "<text x=\"430\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + detail::xml_escape(curves.title) + "</text>\n";

    // axes
    svg += "<line x1=\"" + detail::fixed2(ml) + "\" y1=\"" + detail::fixed2(mt + plot_h) +
           "\" x2=\"" + detail::fixed2(ml + plot_w) + "\" y2=\"" +
           detail::fixed2(mt + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::fixed2(ml) + "\" y1=\"" + detail::fixed2(mt) +
           "\" x2=\"" + detail::fixed2(ml) + "\" y2=\"" + detail::fixed2(mt + plot_h) +
           "\" stroke=\"black\"/>\n";

    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / ticks;
        const double gx = px(fx);
        svg += "<line x1=\"" + detail::fixed2(gx) + "\" y1=\"" + detail::fixed2(mt + plot_h) +
               "\" x2=\"" + detail::fixed2(gx) + "\" y2=\"" +
               detail::fixed2(mt + plot_h + 6) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::fixed2(gx) + "\" y=\"" +
               detail::fixed2(mt + plot_h + 22) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::tick_label(fx) + "</text>\n";
        const double fy = y_min + (y_max - y_min) * i / ticks;
        const double gy = py(fy);
        svg += "<line x1=\"" + detail::fixed2(ml - 6) + "\" y1=\"" + detail::fixed2(gy) +
               "\" x2=\"" + detail::fixed2(ml) + "\" y2=\"" + detail::fixed2(gy) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::fixed2(ml - 10) + "\" y=\"" + detail::fixed2(gy + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::tick_label(fy) + "</text>\n";
    }

    svg += "<text x=\"" + detail::fixed2(ml + plot_w / 2) + "\" y=\"" +
           detail::fixed2(height - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           detail::xml_escape(curves.x_label) + "</text>\n";
    svg += "<text x=\"20\" y=\"" + detail::fixed2(mt + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 20 " + detail::fixed2(mt + plot_h / 2) + ")\">" +
           detail::xml_escape(curves.y_label) + "</text>\n";

    for (std::size_t s = 0; s < curves.series.size(); ++s) {
        const char* color = palette[s % palette_size];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curves.x.size(); ++i) {
            if (i)
                svg += ' ';
            svg += detail::fixed2(px(curves.x[i])) + "," +
                   detail::fixed2(py(curves.series[s].y[i]));
        }
        svg += "\"/>\n";
    }

    // legend, top-right corner of the plot area
    const double lx = ml + plot_w - 170;
    double ly = mt + 14;
    for (std::size_t s = 0; s < curves.series.size(); ++s) {
        const char* color = palette[s % palette_size];
        svg += "<line x1=\"" + detail::fixed2(lx) + "\" y1=\"" + detail::fixed2(ly - 4) +
               "\" x2=\"" + detail::fixed2(lx + 26) + "\" y2=\"" + detail::fixed2(ly - 4) +
               "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + detail::fixed2(lx + 32) + "\" y=\"" + detail::fixed2(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::xml_escape(curves.series[s].label) + "</text>\n";
        ly += 18;
    }

    svg += "</svg>\n";
    atomic_write_text(path, svg);
}

} // namespace protectosim::io
