#pragma once

#include <span>
#include <string>
#include <vector>

#include "platescreen/feature_vector.hpp"
#include "platescreen/image.hpp"
#include "platescreen/segment.hpp"

namespace platescreen::features {

struct InstantParams {
    edges::CannyParams canny;
    edges::LogParams log;
};

// x1..x8 of a segmented image whose background is encoded as 0.
FeatureVector instantaneous_features(const GrayImage& img, const InstantParams& p = {});

struct MotionParams {
    double x_off = 1.0;
    double c_quantile = 0.4;
    double phi = kIntensityRange;
    double smooth_sigma = 0.5;
    bool x9_sqrt = false;  // report the square root of the printed variance form
};

// Trimmed noise threshold mean* + 3 s* over the difference image, trimmed
// to values between the c- and (1-c)-quantiles (inclusive).
double dynamic_threshold(const GrayImage& diff, double c);

// x9..x17 from the difference of two frames.
FeatureVector motion_features(const GrayImage& frame_k, const GrayImage& frame_km1,
                              const MotionParams& p = {});

enum class Aggregate { max, mean, median };
const char* to_string(Aggregate a);

// Ignores gap markers; throws NoDataError when nothing is left.
double aggregate_series(std::span<const double> series, Aggregate op);

// Per-frame motion features over a stream of crops, aggregated into
// MAX_x9, MEAN_x9, MEDIAN_x9, ... Invalid entries stay gaps.
FeatureVector aggregate_motion(const std::vector<GrayImage>& frames, const MotionParams& p = {});

// --- movement index ------------------------------------------------------------

struct MovementParams {
    int max_shift = 2;
};

// Per-egg motion scalar indexed by original frame number (length = number of
// frames before selection). Gaps: first frame, frames adjacent to a dropped
// frame, invalid tracking frames and fine alignments that hit the border.
std::vector<double> movement_index(const segment::TrackedEgg& egg, const ImageStream& stream,
                                   const MovementParams& p = {});

}  // namespace platescreen::features
