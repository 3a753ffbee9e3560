#include <algorithm>
#include <cmath>
#include <limits>

#include "platescreen/raster.hpp"

namespace platescreen::raster {

RgbImage to_rgb(const GrayImage& g) {
    RgbImage out(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) {
            const auto v = g(x, y);
            out(x, y) = {v, v, v};
        }
    return out;
}

void put(RgbImage& img, int x, int y, Rgb c) {
    if (img.contains(x, y)) img(x, y) = c;
}

void fill_rect(RgbImage& img, const Rect& r, Rgb c) {
    for (int y = r.y; y < r.y + r.height; ++y)
        for (int x = r.x; x < r.x + r.width; ++x) put(img, x, y, c);
}

void draw_rect(RgbImage& img, const Rect& r, Rgb c, int thickness, int dash) {
    auto on = [&](int pos) { return dash <= 0 || (pos / dash) % 2 == 0; };
    for (int t = 0; t < thickness; ++t) {
        const int x0 = r.x + t, y0 = r.y + t;
        const int x1 = r.x + r.width - 1 - t, y1 = r.y + r.height - 1 - t;
        for (int x = x0; x <= x1; ++x)
            if (on(x - x0)) {
                put(img, x, y0, c);
                put(img, x, y1, c);
            }
        for (int y = y0; y <= y1; ++y)
            if (on(y - y0)) {
                put(img, x0, y, c);
                put(img, x1, y, c);
            }
    }
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put(img, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_circle(RgbImage& img, int cx, int cy, int r, Rgb c) {
    int x = r, y = 0, err = 1 - r;
    while (x >= y) {
        const int pts[8][2] = {{x, y}, {y, x}, {-y, x}, {-x, y}, {-x, -y}, {-y, -x}, {y, -x}, {x, -y}};
        for (const auto& p : pts) put(img, cx + p[0], cy + p[1], c);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

void blit(RgbImage& dst, const RgbImage& src, int x, int y) {
    for (int j = 0; j < src.height(); ++j)
        for (int i = 0; i < src.width(); ++i) put(dst, x + i, y + j, src(i, j));
}

GrayImage resize(const GrayImage& img, int w, int h) {
    GrayImage out(w, h);
    if (img.empty()) return out;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out(x, y) = img(static_cast<int>(static_cast<long>(x) * img.width() / w),
                            static_cast<int>(static_cast<long>(y) * img.height() / h));
    return out;
}

Rgb heat_color(double t) {
    t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
    return {static_cast<std::uint8_t>(std::lround(255.0 * t)), 0,
            static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)))};
}

RgbImage heatmap(const std::vector<std::vector<double>>& m, int cell_w, int cell_h) {
    std::size_t cols = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : m) {
        cols = std::max(cols, row.size());
        for (double v : row)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    RgbImage out(static_cast<int>(cols) * cell_w, static_cast<int>(m.size()) * cell_h, kGray);
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m[r].size(); ++c) {
            const double v = m[r][c];
            if (!std::isfinite(v)) continue;
            fill_rect(out,
                      {static_cast<int>(c) * cell_w, static_cast<int>(r) * cell_h, cell_w, cell_h},
                      heat_color(hi > lo ? (v - lo) / span : 0.0));
        }
    return out;
}

RgbImage overlay_circles(const GrayImage& img, const std::vector<segment::CircleHit>& hits, Rgb c) {
    RgbImage out = to_rgb(img);
    for (const auto& h : hits)
        draw_circle(out, static_cast<int>(std::lround(h.cx)), static_cast<int>(std::lround(h.cy)),
                    h.r, c);
    return out;
}

RgbImage plot(const std::vector<Series>& series, const PlotOptions& opt) {
    RgbImage out(opt.width, opt.height, kWhite);
    const int ml = 40, mr = 10, mt = 10, mb = 30;
    const int pw = opt.width - ml - mr, ph = opt.height - mt - mb;
    auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (opt.y_min) y0 = *opt.y_min;
    if (opt.y_max) y1 = *opt.y_max;
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto px = [&](double v) { return ml + static_cast<int>(std::lround((tx(v) - x0) / (x1 - x0) * pw)); };
    auto py = [&](double v) { return mt + ph - static_cast<int>(std::lround((v - y0) / (y1 - y0) * ph)); };

    draw_line(out, ml, mt, ml, mt + ph, kBlack);
    draw_line(out, ml, mt + ph, ml + pw, mt + ph, kBlack);
    for (int k = 0; k <= 4; ++k) {
        draw_line(out, ml - 4, mt + ph * k / 4, ml, mt + ph * k / 4, kBlack);
        draw_line(out, ml + pw * k / 4, mt + ph, ml + pw * k / 4, mt + ph + 4, kBlack);
    }
    if (opt.marker_x && *opt.marker_x > 0) {
        const int mx = px(*opt.marker_x);
        for (int y = mt; y < mt + ph; y += 6) draw_line(out, mx, y, mx, std::min(y + 3, mt + ph), kRed);
    }
    for (const auto& s : series) {
        int lx = 0, ly = 0;
        bool have = false;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) {
                have = false;
                continue;
            }
            const int x = px(s.x[i]), y = py(s.y[i]);
            if (s.line && have) draw_line(out, lx, ly, x, y, s.color);
            if (s.points) fill_rect(out, {x - 2, y - 2, 5, 5}, s.color);
            lx = x;
            ly = y;
            have = true;
        }
    }
    return out;
}

RgbImage stacked_bars(const std::vector<std::vector<double>>& fractions,
                      const std::vector<Rgb>& colors, int width, int height) {
    RgbImage out(width, height, kWhite);
    const int mb = 10, mt = 10;
    const int ph = height - mt - mb;
    const int n = static_cast<int>(fractions.size());
    if (n == 0) return out;
    const int slot = width / n;
    for (int g = 0; g < n; ++g) {
        int base = mt + ph;
        double acc = 0.0;
        for (std::size_t c = 0; c < fractions[static_cast<std::size_t>(g)].size(); ++c) {
            acc += fractions[static_cast<std::size_t>(g)][c];
            const int top = mt + ph - static_cast<int>(std::lround(std::min(acc, 1.0) * ph));
            fill_rect(out, {g * slot + slot / 6, top, slot * 2 / 3, base - top},
                      colors.empty() ? kGray : colors[c % colors.size()]);
            base = top;
        }
    }
    draw_line(out, 0, mt + ph, width - 1, mt + ph, kBlack);
    return out;
}

}  // namespace platescreen::raster
