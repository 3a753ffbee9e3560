#include "platescreen/features.hpp"

#include <algorithm>
#include <cmath>

#include "platescreen/edges.hpp"
#include "platescreen/kernels.hpp"
#include "platescreen/preprocess.hpp"

namespace platescreen::features {

namespace {

// Round half up for positive values.
int rd(double v) { return static_cast<int>(std::floor(v + 0.5)); }

double isodata_threshold(const std::vector<double>& v) {
    double t = 0;
    for (double x : v) t += x;
    t /= v.size();
    for (int it = 0; it < 256; ++it) {
        double s0 = 0, s1 = 0;
        std::size_t n0 = 0, n1 = 0;
        for (double x : v) {
            if (x <= t) s0 += x, ++n0;
            else s1 += x, ++n1;
        }
        if (!n0 || !n1) break;
        const double next = 0.5 * (s0 / n0 + s1 / n1);
        const bool done = std::abs(next - t) < 0.5;
        t = next;
        if (done) break;
    }
    return t;
}

double ellipse_axes_difference(const GrayImage& img) {
    std::vector<double> vals;
    for (auto v : img.pixels())
        if (v) vals.push_back(v);
    if (vals.empty()) return 0.0;
    const double t = isodata_threshold(vals);
    double n = 0, sx = 0, sy = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const auto v = img(x, y);
            if (v && v <= t) n += 1, sx += x, sy += y;
        }
    if (n == 0) return 0.0;
    const double mx = sx / n, my = sy / n;
    double m11 = 0, m22 = 0, m12 = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const auto v = img(x, y);
            if (!(v && v <= t)) continue;
            m11 += (x - mx) * (x - mx);
            m22 += (y - my) * (y - my);
            m12 += (x - mx) * (y - my);
        }
    m11 /= n, m22 /= n, m12 /= n;
    const double root = std::sqrt((m11 - m22) * (m11 - m22) + 4 * m12 * m12);
    const double k = 2.0 * std::sqrt(2.0);
    const double mmax = k * std::sqrt(std::max(0.0, m11 + m22 + root));
    const double mmin = k * std::sqrt(std::max(0.0, m11 + m22 - root));
    return mmax - mmin;
}

}  // namespace

FeatureVector instantaneous_features(const GrayImage& img, const InstantParams& p) {
    FeatureVector fv;
    const int W = img.width(), H = img.height();
    const std::size_t N = img.size();
    if (N == 0) throw DimensionError("empty image");

    const auto mom = kernels::moments(img.pixels());
    std::size_t zeros = 0;
    for (auto v : img.pixels()) zeros += v == 0;
    fv.add("x1", static_cast<double>(mom.sum) / N);
    fv.add("x2", zeros == N ? kGap : static_cast<double>(mom.sum) / (N - zeros));

    // middle row and central columns, 1-based in the formulas
    const int row = std::clamp(rd(H / 2.0), 1, H) - 1;
    const int n1 = std::clamp(rd(0.3 * W), 1, W), n2 = std::clamp(rd(0.7 * W), n1, W);
    double s = 0;
    for (int x = n1; x <= n2; ++x) s += img(x - 1, row);
    const double x3 = s / (n2 - n1 + 1);
    double x4 = 0;
    for (int x = n1; x <= n2; ++x) x4 += std::abs(img(x - 1, row) - x3);
    fv.add("x3", x3);
    fv.add("x4", x4);

    fv.add("x5", static_cast<double>(edges::count(edges::canny(img, p.canny))));
    fv.add("x6", static_cast<double>(edges::count(edges::log_edges(img, p.log))));
    fv.add("x7", ellipse_axes_difference(img));
    fv.add("x8", static_cast<double>(W) * H);
    return fv;
}

double dynamic_threshold(const GrayImage& diff, double c) {
    std::vector<double> sorted(diff.pixels().begin(), diff.pixels().end());
    std::sort(sorted.begin(), sorted.end());
    const double qlo = preprocess::percentile(sorted, 100.0 * c);
    const double qhi = preprocess::percentile(sorted, 100.0 * (1.0 - c));
    double sum = 0;
    std::size_t n = 0;
    for (double v : sorted)
        if (v >= qlo && v <= qhi) sum += v, ++n;
    const double mean = sum / n;
    double ss = 0;
    for (double v : sorted)
        if (v >= qlo && v <= qhi) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    return mean + 3.0 * sd;
}

FeatureVector motion_features(const GrayImage& a, const GrayImage& b, const MotionParams& p) {
    if (!a.same_shape(b)) throw DimensionError("motion features need equal frame sizes");
    const std::size_t N = a.size();
    if (N == 0) throw DimensionError("empty image");
    GrayImage d(a.width(), a.height());
    kernels::absdiff(a.pixels(), b.pixels(), d.pixels());
    const auto dm = kernels::diff_moments(a.pixels(), b.pixels());

    const double sum = static_cast<double>(dm.sum);
    const double mean = sum / N;
    double ss = 0;
    for (auto v : d.pixels()) ss += (v - mean) * (v - mean);
    double x9 = N > 1 ? ss / (N - 1) : 0.0;
    if (p.x9_sqrt) x9 = std::sqrt(x9);

    double x11 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double mx = std::max(a.pixels()[i], b.pixels()[i]);
        x11 += d.pixels()[i] / (mx + p.x_off);
    }
    x11 /= N;

    const double idyn = dynamic_threshold(d, p.c_quantile);
    double x12 = 0, x13 = 0;
    for (auto v : d.pixels()) {
        x12 += v > idyn;
        x13 += static_cast<double>(v) / N > idyn;
    }

    const RealImage sm = preprocess::gaussian_smooth(d, p.smooth_sigma);
    const double x15 = *std::max_element(sm.pixels().begin(), sm.pixels().end());

    FeatureVector fv;
    fv.add("x9", x9);
    fv.add("x10", sum / (N * p.phi));
    fv.add("x11", x11);
    fv.add("x12", x12);
    fv.add("x13", x13);
    fv.add("x14", dm.max);
    fv.add("x15", x15);
    fv.add("x16", x9 == 0 ? kGap : sum / x9);
    fv.add("x17", sum);
    return fv;
}

const char* to_string(Aggregate a) {
    switch (a) {
        case Aggregate::max: return "MAX";
        case Aggregate::mean: return "MEAN";
        case Aggregate::median: break;
    }
    return "MEDIAN";
}

double aggregate_series(std::span<const double> series, Aggregate op) {
    std::vector<double> v;
    for (double x : series)
        if (!is_gap(x)) v.push_back(x);
    if (v.empty()) throw NoDataError("series has no valid samples");
    switch (op) {
        case Aggregate::max: return *std::max_element(v.begin(), v.end());
        case Aggregate::mean: {
            double s = 0;
            for (double x : v) s += x;
            return s / v.size();
        }
        case Aggregate::median: {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }
    }
    return kGap;
}

FeatureVector aggregate_motion(const std::vector<GrayImage>& frames, const MotionParams& p) {
    static const char* names[] = {"x9", "x10", "x11", "x12", "x13", "x14", "x15", "x16", "x17"};
    std::vector<std::vector<double>> series(9);
    for (std::size_t k = 1; k < frames.size(); ++k) {
        const auto fv = motion_features(frames[k], frames[k - 1], p);
        for (std::size_t i = 0; i < 9; ++i) series[i].push_back(fv.values[i]);
    }
    FeatureVector out;
    for (auto op : {Aggregate::max, Aggregate::mean, Aggregate::median})
        for (std::size_t i = 0; i < 9; ++i) {
            double v = kGap;
            try {
                v = aggregate_series(series[i], op);
            } catch (const NoDataError&) {
            }
            out.add(std::string(to_string(op)) + "_" + names[i], v);
        }
    return out;
}

}  // namespace platescreen::features
