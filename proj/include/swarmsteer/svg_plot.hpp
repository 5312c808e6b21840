#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "swarmsteer/vec.hpp"

namespace swarmsteer {

struct PlotSeries {
    std::string label;
    std::vector<Vec2> points;
};

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool equal_aspect = false;  // for trajectory panels
    bool markers = false;       // dot at the final point of each series
};

// Self-contained SVG 1.1 line plot, fixed 800x600 viewport, no external
// assets, deterministic element order and number formatting.
std::string render_line_plot(std::span<const PlotSeries> series, const PlotOptions& options);

void write_line_plot(const std::filesystem::path& path, std::span<const PlotSeries> series,
                     const PlotOptions& options);

}  // namespace swarmsteer
