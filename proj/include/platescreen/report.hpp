#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "platescreen/image.hpp"
#include "platescreen/project.hpp"

namespace platescreen::report {

namespace fs = std::filesystem;

struct Tile {
    std::string well_id;
    std::optional<GrayImage> crop;  // placeholder when absent
    bool outlined = false;          // positive endpoint
};

struct Montage {
    RgbImage image;
    std::vector<std::string> order;  // well ids in tile order
    std::vector<Rect> rects;
    int outlined = 0;
};

// Tiles sit at their plate coordinates (A01..H12 row-major, plates stacked);
// ids that do not parse follow in input order. Outlined tiles get a dashed
// red frame.
Montage plate_overlay(std::vector<Tile> tiles, int tile_size = 64);

struct ClassHistogram {
    std::vector<double> dose;
    std::vector<std::string> classes;
    std::vector<std::vector<double>> fractions;  // [dose][class], rows sum to 1
    std::vector<int> n;
    std::string csv() const;
};

// Predicted labels of `endpoint` grouped by the concentration parameter;
// doses without predictions are omitted.
ClassHistogram class_histogram(const Project& p, const std::string& endpoint = "cascade");

struct ReportOptions {
    std::string title = "Plate report";
    int tile_size = 64;
    // eggs x frames movement index, rendered as an extra heatmap section
    std::vector<std::vector<double>> heatmap;
};

struct ReportSummary {
    std::vector<std::string> sections;  // section ids in document order
    std::vector<std::string> files;     // relative to the output directory
};

// Writes index.html, PNG assets and CSV appendices into out. Output depends
// only on the project (and images under base); the project's creation time
// is the one line that varies.
ReportSummary render_report(const Project& p, const fs::path& base, const fs::path& out,
                            const ReportOptions& opt = {});

}  // namespace platescreen::report
