#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "tdcr/errors.hpp"
#include "tdcr/trace_io.hpp"

namespace tdcr {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace svg_detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

inline double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step;
    if (norm < 1.5) step = 1.0;
    else if (norm < 3.0) step = 2.0;
    else if (norm < 7.0) step = 5.0;
    else step = 10.0;
    return step * mag;
}

inline std::string fmt_tick(double v) {
    // trim float noise on tick labels
    double r = std::round(v * 1e6) / 1e6;
    if (r == 0.0) r = 0.0;  // normalize -0
    return fmt(r);
}

struct Frame {
    double x0, x1, y0, y1;  // data bounds
    double px0, px1, py0, py1;  // pixel box (py0 is top)

    double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
    double py(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

inline void expand(double& lo, double& hi) {
    if (lo == hi) { lo -= 1.0; hi += 1.0; }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

}  // namespace svg_detail

/// Self-contained line plot. Multiple series overlay with a legend.
inline void write_line_plot_svg(const std::string& path, const std::string& title,
                                const std::string& xlabel, const std::string& ylabel,
                                const std::vector<PlotSeries>& series) {
    using namespace svg_detail;
    if (series.empty()) throw Error("plot: no series");

    double x0 = series[0].x.empty() ? 0.0 : series[0].x[0], x1 = x0;
    double y0 = series[0].y.empty() ? 0.0 : series[0].y[0], y1 = y0;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) throw Error("plot: bad series " + s.label);
        for (double v : s.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
        for (double v : s.y) { y0 = std::min(y0, v); y1 = std::max(y1, v); }
    }
    expand(x0, x1);
    expand(y0, y1);

    const double W = 720, H = 480;
    Frame f{x0, x1, y0, y1, 70, W - 20, 40, H - 50};

    std::ofstream out(path);
    if (!out) throw Error("cannot open plot file for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";

    // grid and ticks
    const double xstep = nice_step(x1 - x0, 8);
    const double ystep = nice_step(y1 - y0, 7);
    out << "<g font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">\n";
    for (double t = std::ceil(x0 / xstep) * xstep; t <= x1 + 1e-12; t += xstep) {
        const double px = f.px(t);
        out << "<line x1=\"" << px << "\" y1=\"" << f.py0 << "\" x2=\"" << px << "\" y2=\""
            << f.py1 << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << f.py1 + 16
            << "\" text-anchor=\"middle\">" << fmt_tick(t) << "</text>\n";
    }
    for (double t = std::ceil(y0 / ystep) * ystep; t <= y1 + 1e-12; t += ystep) {
        const double py = f.py(t);
        out << "<line x1=\"" << f.px0 << "\" y1=\"" << py << "\" x2=\"" << f.px1 << "\" y2=\""
            << py << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << f.px0 - 6 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\">" << fmt_tick(t) << "</text>\n";
    }
    out << "</g>\n";

    out << "<rect x=\"" << f.px0 << "\" y=\"" << f.py0 << "\" width=\"" << f.px1 - f.px0
        << "\" height=\"" << f.py1 - f.py0 << "\" fill=\"none\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << (f.px0 + f.px1) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (f.py0 + f.py1) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " << (f.py0 + f.py1) / 2 << ")\">" << ylabel
        << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < series[i].x.size(); ++j)
            out << f.px(series[i].x[j]) << ',' << f.py(series[i].y[j]) << ' ';
        out << "\"/>\n";
    }

    if (series.size() > 1 || !series[0].label.empty()) {
        double ly = f.py0 + 14;
        for (std::size_t i = 0; i < series.size(); ++i, ly += 18) {
            out << "<line x1=\"" << f.px0 + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
                << f.px0 + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << kPalette[i % 8]
                << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << f.px0 + 40 << "\" y=\"" << ly
                << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[i].label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
}

/// Overlaid x-z rod centerlines at a fixed stride, equal aspect.
inline void write_rodshape_svg(const std::string& path,
                               const std::vector<std::pair<int, std::vector<Vec3>>>& shapes,
                               const std::string& title) {
    using namespace svg_detail;
    if (shapes.empty()) throw Error("rodshape: no shapes to draw");

    double x0 = 0, x1 = 0, z0 = 0, z1 = 0;
    for (const auto& [iter, line] : shapes)
        for (const Vec3& p : line) {
            x0 = std::min(x0, p.x()); x1 = std::max(x1, p.x());
            z0 = std::min(z0, p.z()); z1 = std::max(z1, p.z());
        }
    expand(x0, x1);
    expand(z0, z1);

    // equal aspect: pad the smaller span
    const double span = std::max(x1 - x0, z1 - z0);
    const double xc = (x0 + x1) / 2, zc = (z0 + z1) / 2;
    x0 = xc - span / 2; x1 = xc + span / 2;
    z0 = zc - span / 2; z1 = zc + span / 2;

    const double W = 560, H = 560;
    Frame f{x0, x1, z0, z1, 60, W - 20, 40, H - 45};

    std::ofstream out(path);
    if (!out) throw Error("cannot open plot file for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" << title << "</text>\n"
        << "<rect x=\"" << f.px0 << "\" y=\"" << f.py0 << "\" width=\"" << f.px1 - f.px0
        << "\" height=\"" << f.py1 - f.py0 << "\" fill=\"none\" stroke=\"#333\"/>\n"
        << "<text x=\"" << (f.px0 + f.px1) / 2 << "\" y=\"" << H - 10
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">x (mm)</text>\n"
        << "<text x=\"16\" y=\"" << (f.py0 + f.py1) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 " << (f.py0 + f.py1) / 2 << ")\">z (mm)</text>\n";

    for (std::size_t i = 0; i < shapes.size(); ++i) {
        // fade from light (early) to dark (late)
        const double frac = shapes.size() > 1 ? double(i) / (shapes.size() - 1) : 1.0;
        const int shade = static_cast<int>(200 - 170 * frac);
        out << "<polyline fill=\"none\" stroke=\"rgb(" << shade / 4 << "," << shade / 2 << ","
            << 100 + shade / 2 << ")\" stroke-width=\"1.4\" points=\"";
        for (const Vec3& p : shapes[i].second) out << f.px(p.x()) << ',' << f.py(p.z()) << ' ';
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace tdcr
