#pragma once

#include <array>

#include "platescreen/image.hpp"

namespace platescreen::edges {

// Normalized 5x5 Gaussian, row-major.
std::array<double, 25> gaussian_kernel5(double sigma);
// Zero-sum 5x5 Laplacian-of-Gaussian, row-major.
std::array<double, 25> log_kernel5(double sigma);

// Direct 2-D 5x5 convolution with edge replication, accumulated row-major
// over the kernel.
RealImage convolve5(const RealImage& img, const std::array<double, 25>& k);

struct Gradient {
    RealImage gx;
    RealImage gy;
    RealImage mag;  // sqrt(gx^2 + gy^2)
};

// 3x3 Sobel with edge replication.
Gradient sobel(const RealImage& img);

struct CannyParams {
    double sigma = 1.0;
    double low_pct = 70.0;   // percentiles of the gradient magnitude
    double high_pct = 90.0;
};

// Binary edge map (0/1).
Mask canny(const RealImage& img, const CannyParams& p = {});
Mask canny(const GrayImage& img, const CannyParams& p = {});

struct LogParams {
    double sigma = 1.0;
    double gate = 0.01;  // fraction of max |LoG| a zero crossing must exceed
};

Mask log_edges(const RealImage& img, const LogParams& p = {});
Mask log_edges(const GrayImage& img, const LogParams& p = {});

std::size_t count(const Mask& m);

}  // namespace platescreen::edges
