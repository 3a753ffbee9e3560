#pragma once

#include <optional>
#include <vector>

#include "platescreen/image.hpp"
#include "platescreen/segment.hpp"

namespace platescreen::raster {

inline constexpr Rgb kRed{220, 30, 30};
inline constexpr Rgb kBlue{30, 60, 220};
inline constexpr Rgb kGreen{30, 160, 60};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kGray{128, 128, 128};

RgbImage to_rgb(const GrayImage& g);

// Out-of-image writes are ignored by every primitive.
void put(RgbImage& img, int x, int y, Rgb c);
void fill_rect(RgbImage& img, const Rect& r, Rgb c);
// dash > 0 draws dash pixels on, dash pixels off along the outline.
void draw_rect(RgbImage& img, const Rect& r, Rgb c, int thickness = 1, int dash = 0);
void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c);
void draw_circle(RgbImage& img, int cx, int cy, int r, Rgb c);
void blit(RgbImage& dst, const RgbImage& src, int x, int y);
// Nearest-neighbour resample.
GrayImage resize(const GrayImage& img, int w, int h);

// Linear blue -> red; t is clamped to [0, 1].
Rgb heat_color(double t);

// Rows x columns matrix, colour scaled over its finite min/max. NaN cells
// are gray.
RgbImage heatmap(const std::vector<std::vector<double>>& m, int cell_w = 1, int cell_h = 1);

RgbImage overlay_circles(const GrayImage& img, const std::vector<segment::CircleHit>& hits,
                         Rgb c = kRed);

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    Rgb color = kBlue;
    bool line = true;
    bool points = false;
};

struct PlotOptions {
    int width = 480;
    int height = 320;
    bool log_x = false;
    std::optional<double> marker_x;  // vertical line, e.g. at the EC value
    std::optional<double> y_min, y_max;
};

RgbImage plot(const std::vector<Series>& series, const PlotOptions& opt = {});

// Stacked bars: one bar per group, segments per class, heights are fractions.
RgbImage stacked_bars(const std::vector<std::vector<double>>& fractions,
                      const std::vector<Rgb>& colors, int width = 480, int height = 320);

}  // namespace platescreen::raster
