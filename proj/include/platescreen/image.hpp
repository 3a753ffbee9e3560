#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "platescreen/error.hpp"

namespace platescreen {

/// Dense row-major 2-D grid. Coordinates are (x, y) = (column, row).
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(area(width, height), fill) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    // Edge-replicated read.
    const T& clamped(int x, int y) const noexcept {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return data_[index(x, y)];
    }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const noexcept {
        return data_.data() + static_cast<std::size_t>(y) * width_;
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    static std::size_t area(int w, int h) {
        if (w < 0 || h < 0) throw DimensionError("negative grid dimensions");
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using GrayImage = Grid<std::uint8_t>;
using RgbImage = Grid<Rgb>;
using RealImage = Grid<double>;
using Mask = Grid<std::uint8_t>;

inline constexpr double kIntensityRange = 255.0;  // phi for 8-bit data

template <typename U, typename T>
Grid<U> convert(const Grid<T>& in) {
    Grid<U> out(in.width(), in.height());
    auto src = in.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<U>(src[i]);
    return out;
}

/// Crop with edge replication for out-of-image coordinates.
template <typename T>
Grid<T> crop_clamped(const Grid<T>& img, int x0, int y0, int w, int h) {
    Grid<T> out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(x, y) = img.clamped(x0 + x, y0 + y);
    return out;
}

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

}  // namespace platescreen
