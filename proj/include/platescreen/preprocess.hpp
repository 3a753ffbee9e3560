#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "platescreen/image_stream.hpp"

namespace platescreen::preprocess {

// --- frame selection --------------------------------------------------------

// Keep the listed frame indices (of this stream), in stream order. Duplicates
// are ignored. Throws EmptySelectionError / DimensionError.
ImageStream select_frames(const ImageStream& stream, const std::vector<int>& keep);

// Inclusive 0-based ranges of frames to drop.
using DropRule = std::vector<std::pair<int, int>>;
ImageStream drop_frames(const ImageStream& stream, const DropRule& rule);

// First three frames and both light-stimulus windows of a 1000-frame PMR run.
DropRule pmr_drop_rule();

// Frames whose mean exceeds factor x the median mean of the first n_ref
// candidate frames. Indices refer to the given stream.
std::vector<int> bright_frames(const ImageStream& stream, double factor = 1.25, int n_ref = 10);

// --- channels ----------------------------------------------------------------

ImageStream to_gray(const ImageStream& stream);

// --- normalization -------------------------------------------------------------

enum class AffineMode { mean_std, min_range };

struct AffineParams {
    double q = 0.0;
    double v = 1.0;
};

AffineParams affine_params(const GrayImage& img, AffineMode mode);
AffineParams affine_params(const RealImage& img, AffineMode mode);

// (in - q) / v. Throws DegenerateSpreadError when v == 0.
RealImage normalize_affine(const GrayImage& img, double q, double v);
RealImage normalize_affine(const RealImage& img, double q, double v);
RealImage normalize_affine(const GrayImage& img, AffineMode mode);

// Nearest-rank percentile: the ceil(p/100 * N)-th smallest value (rank >= 1).
double percentile(std::span<const double> sorted_values, double pct);
std::uint8_t percentile_u8(const GrayImage& img, double pct);

RealImage normalize_saturating(const GrayImage& img, double low_pct = 2.0,
                               double high_pct = 98.0);

// Round [0,1] values back to 0..255 for display.
GrayImage requantize(const RealImage& img);

// --- validity ----------------------------------------------------------------

double mean_intensity(const GrayImage& img);
bool validity_mean_gate(const GrayImage& img, double lo, double hi);

// --- smoothing -----------------------------------------------------------------

std::array<double, 9> gaussian_kernel3(double sigma);
RealImage gaussian_smooth(const RealImage& img, double sigma);
RealImage gaussian_smooth(const GrayImage& img, double sigma);
GrayImage gaussian_smooth_u8(const GrayImage& img, double sigma);
ImageStream smooth_stream(const ImageStream& stream, double sigma);

// --- focus ---------------------------------------------------------------------

// Variance of the 4-neighbour Laplacian over interior pixels.
double sharpness(const GrayImage& img);
int select_sharpest_plane(std::span<const GrayImage> planes);
// Collapse the plane axis of a stream to the sharpest plane of each frame.
ImageStream sharpest_planes(const ImageStream& stream);

}  // namespace platescreen::preprocess
