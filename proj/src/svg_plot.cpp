#include "swarmsteer/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "swarmsteer/error.hpp"

namespace swarmsteer {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginL = 72.0;
constexpr double kMarginR = 24.0;
constexpr double kMarginT = 42.0;
constexpr double kMarginB = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    double span() const { return hi - lo; }
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        double c = lo;
        lo = c - 1.0;
        hi = c + 1.0;
    }
    double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

// 1-2-5 tick spacing aiming for ~6 ticks.
std::vector<double> ticks(const Range& r) {
    double raw = r.span() / 6.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    step *= mag;
    std::vector<double> out;
    double first = std::ceil(r.lo / step) * step;
    for (double v = first; v <= r.hi + 1e-12 * r.span(); v += step) {
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

std::string escape_xml(const std::string& s) {
    std::string out;
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

}  // namespace

std::string render_line_plot(std::span<const PlotSeries> series, const PlotOptions& options) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const PlotSeries& s : series) {
        for (const Vec2& p : s.points) {
            if (!any) {
                xmin = xmax = p.x;
                ymin = ymax = p.y;
                any = true;
            } else {
                xmin = std::min(xmin, p.x);
                xmax = std::max(xmax, p.x);
                ymin = std::min(ymin, p.y);
                ymax = std::max(ymax, p.y);
            }
        }
    }
    Range rx = padded(xmin, xmax);
    Range ry = padded(ymin, ymax);
    if (options.equal_aspect) {
        double plot_w = kWidth - kMarginL - kMarginR;
        double plot_h = kHeight - kMarginT - kMarginB;
        double unit = std::max(rx.span() / plot_w, ry.span() / plot_h);
        double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
        rx = {cx - 0.5 * unit * plot_w, cx + 0.5 * unit * plot_w};
        ry = {cy - 0.5 * unit * plot_h, cy + 0.5 * unit * plot_h};
    }

    auto sx = [&](double v) { return kMarginL + (v - rx.lo) / rx.span() * (kWidth - kMarginL - kMarginR); };
    auto sy = [&](double v) { return kHeight - kMarginB - (v - ry.lo) / ry.span() * (kHeight - kMarginT - kMarginB); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";

    // grid and tick labels
    for (double v : ticks(rx)) {
        std::string x = px(sx(v));
        svg += "<line x1=\"" + x + "\" y1=\"" + px(kMarginT) + "\" x2=\"" + x + "\" y2=\"" +
               px(kHeight - kMarginB) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + px(kHeight - kMarginB + 18.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               tick_label(v) + "</text>\n";
    }
    for (double v : ticks(ry)) {
        std::string y = px(sy(v));
        svg += "<line x1=\"" + px(kMarginL) + "\" y1=\"" + y + "\" x2=\"" +
               px(kWidth - kMarginR) + "\" y2=\"" + y +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + px(kMarginL - 8.0) + "\" y=\"" + px(sy(v) + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               tick_label(v) + "</text>\n";
    }

    // axes box
    svg += "<rect x=\"" + px(kMarginL) + "\" y=\"" + px(kMarginT) + "\" width=\"" +
           px(kWidth - kMarginL - kMarginR) + "\" height=\"" + px(kHeight - kMarginT - kMarginB) +
           "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    // series
    for (std::size_t i = 0; i < series.size(); ++i) {
        const PlotSeries& s = series[i];
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.points.size() >= 2) {
            std::string pts;
            for (const Vec2& p : s.points) {
                if (!pts.empty()) pts += ' ';
                pts += px(sx(p.x)) + "," + px(sy(p.y));
            }
            svg += std::string("<polyline fill=\"none\" stroke=\"") + color +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        if (options.markers && !s.points.empty()) {
            const Vec2& p = s.points.back();
            svg += std::string("<circle cx=\"") + px(sx(p.x)) + "\" cy=\"" + px(sy(p.y)) +
                   "\" r=\"4\" fill=\"" + color + "\"/>\n";
        }
    }

    // legend
    double ly = kMarginT + 16.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].label.empty()) continue;
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg += std::string("<line x1=\"") + px(kWidth - kMarginR - 150.0) + "\" y1=\"" +
               px(ly - 4.0) + "\" x2=\"" + px(kWidth - kMarginR - 126.0) + "\" y2=\"" +
               px(ly - 4.0) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + px(kWidth - kMarginR - 120.0) + "\" y=\"" + px(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(series[i].label) +
               "</text>\n";
        ly += 16.0;
    }

    // labels
    svg += "<text x=\"" + px(kMarginL + 0.5 * (kWidth - kMarginL - kMarginR)) + "\" y=\"24\" "
           "font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
           escape_xml(options.title) + "</text>\n";
    svg += "<text x=\"" + px(kMarginL + 0.5 * (kWidth - kMarginL - kMarginR)) + "\" y=\"" +
           px(kHeight - 14.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
           escape_xml(options.xlabel) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + px(kMarginT + 0.5 * (kHeight - kMarginT - kMarginB)) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " +
           px(kMarginT + 0.5 * (kHeight - kMarginT - kMarginB)) + ")\">" +
           escape_xml(options.ylabel) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

void write_line_plot(const std::filesystem::path& path, std::span<const PlotSeries> series,
                     const PlotOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << render_line_plot(series, options);
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace swarmsteer
