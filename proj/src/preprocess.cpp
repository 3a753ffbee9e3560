#include "platescreen/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "platescreen/kernels.hpp"

namespace platescreen::preprocess {

ImageStream select_frames(const ImageStream& stream, const std::vector<int>& keep) {
    std::set<int> idx;
    for (int k : keep) {
        if (k < 0 || k >= stream.n_frames())
            throw DimensionError("frame index " + std::to_string(k) + " out of range");
        idx.insert(k);
    }
    if (idx.empty()) throw EmptySelectionError("frame selection is empty");

    std::vector<GrayImage> images;
    std::vector<int> source;
    std::set<int> dropped(stream.dropped_frames().begin(), stream.dropped_frames().end());
    for (int k = 0; k < stream.n_frames(); ++k) {
        if (!idx.count(k)) {
            dropped.insert(stream.source_frames()[k]);
            continue;
        }
        source.push_back(stream.source_frames()[k]);
        for (int p = 0; p < stream.n_planes(); ++p)
            for (int c = 0; c < stream.n_channels(); ++c) images.push_back(stream.at(k, p, c));
    }
    ImageStream out(std::move(images), static_cast<int>(source.size()), stream.n_planes(),
                    stream.n_channels(), stream.frame_rate_hz());
    return out.with_provenance(std::move(source), {dropped.begin(), dropped.end()});
}

ImageStream drop_frames(const ImageStream& stream, const DropRule& rule) {
    std::vector<int> keep;
    for (int k = 0; k < stream.n_frames(); ++k) {
        bool drop = false;
        for (const auto& [a, b] : rule) drop = drop || (k >= a && k <= b);
        if (!drop) keep.push_back(k);
    }
    return select_frames(stream, keep);
}

DropRule pmr_drop_rule() { return {{0, 2}, {249, 299}, {649, 699}}; }

double mean_intensity(const GrayImage& img) {
    if (img.empty()) return 0.0;
    return static_cast<double>(kernels::moments(img.pixels()).sum) / img.size();
}

std::vector<int> bright_frames(const ImageStream& stream, double factor, int n_ref) {
    std::vector<double> means(stream.n_frames());
    for (int k = 0; k < stream.n_frames(); ++k) means[k] = mean_intensity(stream.at(k));
    std::vector<double> ref(means.begin(),
                            means.begin() + std::min<int>(n_ref, stream.n_frames()));
    std::sort(ref.begin(), ref.end());
    if (ref.empty()) return {};
    const std::size_t m = ref.size();
    const double med = m % 2 ? ref[m / 2] : 0.5 * (ref[m / 2 - 1] + ref[m / 2]);
    std::vector<int> out;
    for (int k = 0; k < stream.n_frames(); ++k)
        if (means[k] > factor * med) out.push_back(k);
    return out;
}

ImageStream to_gray(const ImageStream& stream) {
    if (stream.n_channels() == 1) return stream;
    if (stream.n_channels() != 3) throw DimensionError("to_gray needs 1 or 3 channels");
    std::vector<GrayImage> images;
    for (int k = 0; k < stream.n_frames(); ++k)
        for (int p = 0; p < stream.n_planes(); ++p) {
            GrayImage g(stream.width(), stream.height());
            kernels::active().mean3(stream.at(k, p, 0).data(), stream.at(k, p, 1).data(),
                                    stream.at(k, p, 2).data(), g.data(), g.size());
            images.push_back(std::move(g));
        }
    ImageStream out(std::move(images), stream.n_frames(), stream.n_planes(), 1,
                    stream.frame_rate_hz());
    return out.with_provenance(stream.source_frames(), stream.dropped_frames());
}

namespace {

template <typename T>
AffineParams affine_params_impl(const Grid<T>& img, AffineMode mode) {
    const auto px = img.pixels();
    if (px.empty()) throw DegenerateSpreadError("empty image");
    if (mode == AffineMode::min_range) {
        const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
        return {static_cast<double>(*lo), static_cast<double>(*hi) - static_cast<double>(*lo)};
    }
    double sum = 0;
    for (auto v : px) sum += v;
    const double mean = sum / px.size();
    double ss = 0;
    for (auto v : px) ss += (v - mean) * (v - mean);
    const double sd = px.size() > 1 ? std::sqrt(ss / (px.size() - 1)) : 0.0;
    return {mean, sd};
}

template <typename T>
RealImage normalize_affine_impl(const Grid<T>& img, double q, double v) {
    if (v == 0.0) throw DegenerateSpreadError("normalization spread is zero (constant image)");
    RealImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out.pixels()[i] = (img.pixels()[i] - q) / v;
    return out;
}

}  // namespace

AffineParams affine_params(const GrayImage& img, AffineMode mode) {
    return affine_params_impl(img, mode);
}
AffineParams affine_params(const RealImage& img, AffineMode mode) {
    return affine_params_impl(img, mode);
}

RealImage normalize_affine(const GrayImage& img, double q, double v) {
    return normalize_affine_impl(img, q, v);
}
RealImage normalize_affine(const RealImage& img, double q, double v) {
    return normalize_affine_impl(img, q, v);
}
RealImage normalize_affine(const GrayImage& img, AffineMode mode) {
    const auto p = affine_params(img, mode);
    return normalize_affine(img, p.q, p.v);
}

double percentile(std::span<const double> sorted, double pct) {
    if (sorted.empty()) throw NoDataError("percentile of empty set");
    const auto n = static_cast<long>(sorted.size());
    long rank = static_cast<long>(std::ceil(pct / 100.0 * n));
    rank = std::clamp(rank, 1L, n);
    return sorted[rank - 1];
}

std::uint8_t percentile_u8(const GrayImage& img, double pct) {
    if (img.empty()) throw NoDataError("percentile of empty image");
    std::array<std::size_t, 256> hist{};
    for (auto v : img.pixels()) ++hist[v];
    const auto n = static_cast<long>(img.size());
    long rank = std::clamp(static_cast<long>(std::ceil(pct / 100.0 * n)), 1L, n);
    long cum = 0;
    for (int v = 0; v < 256; ++v) {
        cum += static_cast<long>(hist[v]);
        if (cum >= rank) return static_cast<std::uint8_t>(v);
    }
    return 255;
}

RealImage normalize_saturating(const GrayImage& img, double low_pct, double high_pct) {
    if (!(low_pct >= 0 && low_pct < high_pct && high_pct <= 100))
        throw InvalidArgumentError("need 0 <= low_pct < high_pct <= 100");
    const double lo = percentile_u8(img, low_pct);
    const double hi = percentile_u8(img, high_pct);
    if (lo == hi) throw DegenerateSpreadError("saturation percentiles coincide");
    RealImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = img.pixels()[i];
        out.pixels()[i] = v <= lo ? 0.0 : v >= hi ? 1.0 : (v - lo) / (hi - lo);
    }
    return out;
}

GrayImage requantize(const RealImage& img) {
    GrayImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels()[i] = static_cast<std::uint8_t>(
            std::lround(std::clamp(img.pixels()[i], 0.0, 1.0) * kIntensityRange));
    return out;
}

bool validity_mean_gate(const GrayImage& img, double lo, double hi) {
    const double m = mean_intensity(img);
    return m >= lo && m <= hi;
}

std::array<double, 9> gaussian_kernel3(double sigma) {
    if (!(sigma > 0)) throw InvalidArgumentError("sigma must be positive");
    std::array<double, 9> h{};
    double sum = 0;
    for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
            const double v = std::exp(-(i * i + j * j) / (2 * sigma * sigma));
            h[(j + 1) * 3 + (i + 1)] = v;
            sum += v;
        }
    for (auto& v : h) v /= sum;
    return h;
}

namespace {

template <typename T>
RealImage smooth3(const Grid<T>& img, double sigma) {
    const auto h = gaussian_kernel3(sigma);
    RealImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0;
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i)
                    acc += h[(j + 1) * 3 + (i + 1)] * img.clamped(x + i, y + j);
            out(x, y) = acc;
        }
    return out;
}

}  // namespace

RealImage gaussian_smooth(const RealImage& img, double sigma) { return smooth3(img, sigma); }
RealImage gaussian_smooth(const GrayImage& img, double sigma) { return smooth3(img, sigma); }

GrayImage gaussian_smooth_u8(const GrayImage& img, double sigma) {
    const RealImage s = smooth3(img, sigma);
    GrayImage out(img.width(), img.height());
    for (std::size_t i = 0; i < s.size(); ++i)
        out.pixels()[i] =
            static_cast<std::uint8_t>(std::clamp(std::lround(s.pixels()[i]), 0L, 255L));
    return out;
}

ImageStream smooth_stream(const ImageStream& stream, double sigma) {
    std::vector<GrayImage> images;
    images.reserve(stream.images().size());
    for (const auto& img : stream.images()) images.push_back(gaussian_smooth_u8(img, sigma));
    ImageStream out(std::move(images), stream.n_frames(), stream.n_planes(),
                    stream.n_channels(), stream.frame_rate_hz());
    return out.with_provenance(stream.source_frames(), stream.dropped_frames());
}

double sharpness(const GrayImage& img) {
    if (img.width() < 3 || img.height() < 3) return 0.0;
    double sum = 0, sum2 = 0;
    std::size_t n = 0;
    for (int y = 1; y < img.height() - 1; ++y)
        for (int x = 1; x < img.width() - 1; ++x) {
            const double l = img(x - 1, y) + img(x + 1, y) + img(x, y - 1) + img(x, y + 1) -
                             4.0 * img(x, y);
            sum += l;
            sum2 += l * l;
            ++n;
        }
    const double mean = sum / n;
    return sum2 / n - mean * mean;
}

int select_sharpest_plane(std::span<const GrayImage> planes) {
    if (planes.empty()) throw InvalidArgumentError("no planes");
    int best = 0;
    double best_s = sharpness(planes[0]);
    for (std::size_t i = 1; i < planes.size(); ++i) {
        const double s = sharpness(planes[i]);
        if (s > best_s) {
            best_s = s;
            best = static_cast<int>(i);
        }
    }
    return best;
}

ImageStream sharpest_planes(const ImageStream& stream) {
    if (stream.n_planes() == 1) return stream;
    std::vector<GrayImage> images;
    for (int k = 0; k < stream.n_frames(); ++k) {
        std::vector<GrayImage> planes;
        for (int p = 0; p < stream.n_planes(); ++p) planes.push_back(stream.at(k, p, 0));
        const int best = select_sharpest_plane(planes);
        for (int c = 0; c < stream.n_channels(); ++c) images.push_back(stream.at(k, best, c));
    }
    ImageStream out(std::move(images), stream.n_frames(), 1, stream.n_channels(),
                    stream.frame_rate_hz());
    return out.with_provenance(stream.source_frames(), stream.dropped_frames());
}

}  // namespace platescreen::preprocess
