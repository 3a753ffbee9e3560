#include "platescreen/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "platescreen/preprocess.hpp"

namespace platescreen::edges {

std::array<double, 25> gaussian_kernel5(double sigma) {
    std::array<double, 25> k{};
    double sum = 0;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) {
            const double v = std::exp(-(i * i + j * j) / (2 * sigma * sigma));
            k[(j + 2) * 5 + (i + 2)] = v;
            sum += v;
        }
    for (auto& v : k) v /= sum;
    return k;
}

std::array<double, 25> log_kernel5(double sigma) {
    std::array<double, 25> k{};
    const double s2 = sigma * sigma;
    double sum = 0;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) {
            const double r2 = i * i + j * j;
            const double v = -1.0 / (std::numbers::pi * s2 * s2) * (1 - r2 / (2 * s2)) *
                             std::exp(-r2 / (2 * s2));
            k[(j + 2) * 5 + (i + 2)] = v;
            sum += v;
        }
    for (auto& v : k) v -= sum / 25.0;
    return k;
}

RealImage convolve5(const RealImage& img, const std::array<double, 25>& k) {
    RealImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0;
            for (int j = -2; j <= 2; ++j)
                for (int i = -2; i <= 2; ++i)
                    acc += k[(j + 2) * 5 + (i + 2)] * img.clamped(x + i, y + j);
            out(x, y) = acc;
        }
    return out;
}

Gradient sobel(const RealImage& img) {
    Gradient g{RealImage(img.width(), img.height()), RealImage(img.width(), img.height()),
               RealImage(img.width(), img.height())};
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double a = img.clamped(x - 1, y - 1), b = img.clamped(x, y - 1),
                         c = img.clamped(x + 1, y - 1), d = img.clamped(x - 1, y),
                         f = img.clamped(x + 1, y), gg = img.clamped(x - 1, y + 1),
                         h = img.clamped(x, y + 1), i = img.clamped(x + 1, y + 1);
            const double gx = (c + 2 * f + i) - (a + 2 * d + gg);
            const double gy = (gg + 2 * h + i) - (a + 2 * b + c);
            g.gx(x, y) = gx;
            g.gy(x, y) = gy;
            g.mag(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    return g;
}

Mask canny(const RealImage& img, const CannyParams& p) {
    const int w = img.width(), h = img.height();
    Mask out(w, h, 0);
    if (img.empty()) return out;
    const Gradient g = sobel(convolve5(img, gaussian_kernel5(p.sigma)));

    // tan(22.5 deg) and tan(67.5 deg) split the gradient direction into sectors
    const double t1 = std::tan(std::numbers::pi / 8), t2 = std::tan(3 * std::numbers::pi / 8);
    RealImage nms(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double m = g.mag(x, y);
            if (m <= 0) continue;
            const double ax = std::abs(g.gx(x, y)), ay = std::abs(g.gy(x, y));
            int dx, dy;
            if (ay <= t1 * ax) {
                dx = 1, dy = 0;
            } else if (ay >= t2 * ax) {
                dx = 0, dy = 1;
            } else if (g.gx(x, y) * g.gy(x, y) > 0) {
                dx = 1, dy = 1;
            } else {
                dx = 1, dy = -1;
            }
            if (m >= g.mag.clamped(x + dx, y + dy) && m >= g.mag.clamped(x - dx, y - dy))
                nms(x, y) = m;
        }

    std::vector<double> sorted(g.mag.pixels().begin(), g.mag.pixels().end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = preprocess::percentile(sorted, p.low_pct);
    const double hi = preprocess::percentile(sorted, p.high_pct);

    std::vector<int> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (nms(x, y) > 0 && nms(x, y) >= hi) {
                out(x, y) = 1;
                stack.push_back(y * w + x);
            }
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w, y = idx / w;
        for (int j = -1; j <= 1; ++j)
            for (int i = -1; i <= 1; ++i) {
                const int nx = x + i, ny = y + j;
                if (!out.contains(nx, ny) || out(nx, ny)) continue;
                if (nms(nx, ny) > 0 && nms(nx, ny) >= lo) {
                    out(nx, ny) = 1;
                    stack.push_back(ny * w + nx);
                }
            }
    }
    return out;
}

Mask canny(const GrayImage& img, const CannyParams& p) {
    return canny(convert<double>(img), p);
}

Mask log_edges(const RealImage& img, const LogParams& p) {
    const int w = img.width(), h = img.height();
    Mask out(w, h, 0);
    if (img.empty()) return out;
    const RealImage L = convolve5(img, log_kernel5(p.sigma));
    double max_abs = 0;
    for (double v : L.pixels()) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0) return out;
    const double gate = p.gate * max_abs;
    constexpr int nx4[] = {1, -1, 0, 0}, ny4[] = {0, 0, 1, -1};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = L(x, y);
            if (v <= 0) continue;
            for (int n = 0; n < 4; ++n) {
                const int xx = x + nx4[n], yy = y + ny4[n];
                if (!L.contains(xx, yy)) continue;
                const double u = L(xx, yy);
                if (u < 0 && v - u > gate) {
                    out(x, y) = 1;
                    break;
                }
            }
        }
    return out;
}

Mask log_edges(const GrayImage& img, const LogParams& p) {
    return log_edges(convert<double>(img), p);
}

std::size_t count(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m.pixels()) n += v != 0;
    return n;
}

}  // namespace platescreen::edges
