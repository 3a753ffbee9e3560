#pragma once
// Naive reference implementations used as test oracles. Written against the
// feature definitions directly, on plain nested vectors, without touching the
// library's image or kernel code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Img = std::vector<std::vector<double>>;  // [y][x]

inline int W(const Img& a) { return a.empty() ? 0 : static_cast<int>(a[0].size()); }
inline int H(const Img& a) { return static_cast<int>(a.size()); }

inline double at(const Img& a, int x, int y) {
    x = std::max(0, std::min(W(a) - 1, x));
    y = std::max(0, std::min(H(a) - 1, y));
    return a[y][x];
}

inline double nearest_rank(std::vector<double> v, double pct) {
    std::sort(v.begin(), v.end());
    long n = static_cast<long>(v.size());
    long r = static_cast<long>(std::ceil(pct / 100.0 * n));
    if (r < 1) r = 1;
    if (r > n) r = n;
    return v[r - 1];
}

inline Img conv(const Img& a, int half, const std::vector<double>& k) {
    const int kw = 2 * half + 1;
    Img o(H(a), std::vector<double>(W(a), 0.0));
    for (int y = 0; y < H(a); ++y)
        for (int x = 0; x < W(a); ++x) {
            double s = 0;
            for (int j = -half; j <= half; ++j)
                for (int i = -half; i <= half; ++i)
                    s += k[(j + half) * kw + (i + half)] * at(a, x + i, y + j);
            o[y][x] = s;
        }
    return o;
}

inline std::vector<double> gauss(int half, double sigma) {
    std::vector<double> k;
    double s = 0;
    for (int j = -half; j <= half; ++j)
        for (int i = -half; i <= half; ++i) {
            k.push_back(std::exp(-(i * i + j * j) / (2 * sigma * sigma)));
            s += k.back();
        }
    for (auto& v : k) v /= s;
    return k;
}

inline std::vector<double> log5(double sigma) {
    std::vector<double> k;
    const double s2 = sigma * sigma;
    double s = 0;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) {
            const double r2 = i * i + j * j;
            k.push_back(-1.0 / (std::numbers::pi * s2 * s2) * (1 - r2 / (2 * s2)) *
                        std::exp(-r2 / (2 * s2)));
            s += k.back();
        }
    for (auto& v : k) v -= s / 25.0;
    return k;
}

inline int canny_count(const Img& a) {
    const int w = W(a), h = H(a);
    const Img g = conv(a, 2, gauss(2, 1.0));
    Img gx(h, std::vector<double>(w)), gy = gx, mag = gx;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            gx[y][x] = (at(g, x + 1, y - 1) + 2 * at(g, x + 1, y) + at(g, x + 1, y + 1)) -
                       (at(g, x - 1, y - 1) + 2 * at(g, x - 1, y) + at(g, x - 1, y + 1));
            gy[y][x] = (at(g, x - 1, y + 1) + 2 * at(g, x, y + 1) + at(g, x + 1, y + 1)) -
                       (at(g, x - 1, y - 1) + 2 * at(g, x, y - 1) + at(g, x + 1, y - 1));
            mag[y][x] = std::sqrt(gx[y][x] * gx[y][x] + gy[y][x] * gy[y][x]);
        }
    Img nms(h, std::vector<double>(w, 0.0));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (mag[y][x] <= 0) continue;
            double ang = std::atan2(gy[y][x], gx[y][x]) * 180.0 / std::numbers::pi;
            if (ang < 0) ang += 180.0;
            int dx = 1, dy = 0;
            if (ang >= 22.5 && ang < 67.5) dx = 1, dy = 1;
            else if (ang >= 67.5 && ang < 112.5) dx = 0, dy = 1;
            else if (ang >= 112.5 && ang < 157.5) dx = 1, dy = -1;
            if (mag[y][x] >= at(mag, x + dx, y + dy) && mag[y][x] >= at(mag, x - dx, y - dy))
                nms[y][x] = mag[y][x];
        }
    std::vector<double> all;
    for (auto& r : mag) all.insert(all.end(), r.begin(), r.end());
    const double lo = nearest_rank(all, 70), hi = nearest_rank(all, 90);
    std::vector<std::vector<int>> e(h, std::vector<int>(w, 0));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) e[y][x] = nms[y][x] > 0 && nms[y][x] >= hi;
    for (bool grew = true; grew;) {
        grew = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (e[y][x] || !(nms[y][x] > 0 && nms[y][x] >= lo)) continue;
                for (int j = -1; j <= 1 && !e[y][x]; ++j)
                    for (int i = -1; i <= 1; ++i) {
                        const int xx = x + i, yy = y + j;
                        if (xx >= 0 && yy >= 0 && xx < w && yy < h && e[yy][xx]) {
                            e[y][x] = 1;
                            grew = true;
                            break;
                        }
                    }
            }
    }
    int n = 0;
    for (auto& r : e)
        for (int v : r) n += v;
    return n;
}

inline int log_count(const Img& a) {
    const Img L = conv(a, 2, log5(1.0));
    double mx = 0;
    for (auto& r : L)
        for (double v : r) mx = std::max(mx, std::fabs(v));
    if (mx == 0) return 0;
    int n = 0;
    for (int y = 0; y < H(a); ++y)
        for (int x = 0; x < W(a); ++x) {
            if (L[y][x] <= 0) continue;
            bool hit = false;
            const int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto& o : d) {
                const int xx = x + o[0], yy = y + o[1];
                if (xx < 0 || yy < 0 || xx >= W(a) || yy >= H(a)) continue;
                if (L[yy][xx] < 0 && L[y][x] - L[yy][xx] > 0.01 * mx) hit = true;
            }
            n += hit;
        }
    return n;
}

// Ridler-Calvard iteration on the foreground values, then second moments of
// the dark part of the foreground; major minus minor ellipse axis.
inline double axes_difference(const Img& a) {
    std::vector<double> fg;
    for (auto& r : a)
        for (double v : r)
            if (v != 0) fg.push_back(v);
    if (fg.empty()) return 0.0;
    double t = 0;
    for (double v : fg) t += v;
    t /= fg.size();
    for (int it = 0; it < 256; ++it) {
        double lo = 0, hi = 0;
        int nl = 0, nh = 0;
        for (double v : fg) (v <= t ? (lo += v, ++nl) : (hi += v, ++nh));
        if (nl == 0 || nh == 0) break;
        const double nt = (lo / nl + hi / nh) / 2;
        const bool stop = std::fabs(nt - t) < 0.5;
        t = nt;
        if (stop) break;
    }
    std::vector<std::pair<double, double>> pts;
    for (int y = 0; y < H(a); ++y)
        for (int x = 0; x < W(a); ++x)
            if (a[y][x] != 0 && a[y][x] <= t) pts.push_back({x, y});
    if (pts.empty()) return 0.0;
    double mx = 0, my = 0;
    for (auto& p : pts) mx += p.first, my += p.second;
    mx /= pts.size(), my /= pts.size();
    double sxx = 0, syy = 0, sxy = 0;
    for (auto& p : pts) {
        sxx += (p.first - mx) * (p.first - mx);
        syy += (p.second - my) * (p.second - my);
        sxy += (p.first - mx) * (p.second - my);
    }
    sxx /= pts.size(), syy /= pts.size(), sxy /= pts.size();
    // eigenvalues of the 2x2 covariance
    const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const double l1 = tr / 2 + disc, l2 = std::max(0.0, tr / 2 - disc);
    return 4.0 * std::sqrt(l1) - 4.0 * std::sqrt(l2);
}

inline std::map<std::string, double> instantaneous(const Img& a) {
    const int w = W(a), h = H(a);
    double sum = 0;
    int nz = 0;
    for (auto& r : a)
        for (double v : r) sum += v, nz += v != 0;
    std::map<std::string, double> f;
    f["x1"] = sum / (w * h);
    f["x2"] = nz ? sum / nz : std::numeric_limits<double>::quiet_NaN();
    auto rnd = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
    const int row = std::max(1, std::min(h, rnd(h / 2.0)));
    const int n1 = std::max(1, std::min(w, rnd(0.3 * w)));
    const int n2 = std::max(n1, std::min(w, rnd(0.7 * w)));
    double m = 0;
    for (int j = n1; j <= n2; ++j) m += a[row - 1][j - 1];
    m /= (n2 - n1 + 1);
    double dev = 0;
    for (int j = n1; j <= n2; ++j) dev += std::fabs(a[row - 1][j - 1] - m);
    f["x3"] = m;
    f["x4"] = dev;
    f["x5"] = canny_count(a);
    f["x6"] = log_count(a);
    f["x7"] = axes_difference(a);
    f["x8"] = w * h;
    return f;
}

inline double trimmed_threshold(std::vector<double> d, double c) {
    const double lo = nearest_rank(d, 100 * c), hi = nearest_rank(d, 100 * (1 - c));
    std::vector<double> keep;
    for (double v : d)
        if (v >= lo && v <= hi) keep.push_back(v);
    double m = 0;
    for (double v : keep) m += v;
    m /= keep.size();
    double ss = 0;
    for (double v : keep) ss += (v - m) * (v - m);
    const double sd = keep.size() > 1 ? std::sqrt(ss / (keep.size() - 1)) : 0.0;
    return m + 3 * sd;
}

inline std::map<std::string, double> motion(const Img& a, const Img& b) {
    const int w = W(a), h = H(a);
    const double n = static_cast<double>(w) * h;
    Img d(h, std::vector<double>(w));
    std::vector<double> flat;
    double sum = 0, mx = 0, x11 = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            d[y][x] = std::fabs(a[y][x] - b[y][x]);
            flat.push_back(d[y][x]);
            sum += d[y][x];
            mx = std::max(mx, d[y][x]);
            x11 += d[y][x] / (std::max(a[y][x], b[y][x]) + 1.0);
        }
    const double mean = sum / n;
    double ss = 0;
    for (double v : flat) ss += (v - mean) * (v - mean);
    const double var = n > 1 ? ss / (n - 1) : 0.0;
    const double thr = trimmed_threshold(flat, 0.4);
    double x12 = 0, x13 = 0;
    for (double v : flat) x12 += v > thr, x13 += v / n > thr;
    const Img sm = conv(d, 1, gauss(1, 0.5));
    double x15 = -1;
    for (auto& r : sm)
        for (double v : r) x15 = std::max(x15, v);
    std::map<std::string, double> f;
    f["x9"] = var;
    f["x10"] = sum / (n * 255.0);
    f["x11"] = x11 / n;
    f["x12"] = x12;
    f["x13"] = x13;
    f["x14"] = mx;
    f["x15"] = x15;
    f["x16"] = var == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / var;
    f["x17"] = sum;
    return f;
}

// Monte-Carlo error of the true-density Bayes rule for two 2-D Gaussians
// with equal priors.
struct Gauss2 {
    double mx, my, sxx, syy, sxy;
    double logpdf(double x, double y) const {
        const double det = sxx * syy - sxy * sxy;
        const double dx = x - mx, dy = y - my;
        const double q = (syy * dx * dx - 2 * sxy * dx * dy + sxx * dy * dy) / det;
        return -0.5 * q - 0.5 * std::log(det) - std::log(2 * std::numbers::pi);
    }
    template <class R>
    std::pair<double, double> sample(R& rng) const {
        std::normal_distribution<double> n(0, 1);
        const double l11 = std::sqrt(sxx), l21 = sxy / l11,
                     l22 = std::sqrt(syy - l21 * l21);
        const double u = n(rng), v = n(rng);
        return {mx + l11 * u, my + l21 * u + l22 * v};
    }
};

inline double bayes_error_mc(const Gauss2& a, const Gauss2& b, int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    long wrong = 0;
    for (int i = 0; i < n; ++i) {
        auto [x, y] = a.sample(rng);
        wrong += b.logpdf(x, y) > a.logpdf(x, y);
        auto [u, v] = b.sample(rng);
        wrong += a.logpdf(u, v) > b.logpdf(u, v);
    }
    return static_cast<double>(wrong) / (2.0 * n);
}

}  // namespace oracle
