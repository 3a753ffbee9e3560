#pragma once

#include <optional>
#include <vector>

#include "platescreen/edges.hpp"
#include "platescreen/image_stream.hpp"

namespace platescreen::segment {

// --- single object -----------------------------------------------------------

struct SingleEggParams {
    double target_area_px = 0.0;
    double roundness_min = 0.7;
    double tol_pct = 20.0;
    int max_iter = 12;
};

struct SingleEggResult {
    bool valid = false;
    Mask mask;  // full-image mask of the accepted component
    Rect box;
    int threshold = 0;
    double area = 0.0;
    double roundness = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int iterations = 0;
};

// 4*pi*area / perimeter^2, perimeter from boundary edge count scaled by pi/4.
double roundness(const Mask& component);

// Bisection over a global threshold (object darker than background).
SingleEggResult segment_single_egg(const GrayImage& img, const SingleEggParams& p);

// --- multi object ----------------------------------------------------------------

struct CircleHit {
    double cx = 0.0;
    double cy = 0.0;
    int r = 0;
    double score = 0.0;
    double mean_gray = 0.0;
};

struct HoughParams {
    int r_min = 20;
    int r_max = 30;
    double accum_threshold = 130.0;
    double conflict_factor = 0.9;  // of the typical diameter
    double gray_lo = 50.0;
    double gray_hi = 200.0;
    bool gates = true;  // mean-gray and inside-image filters
    edges::CannyParams canny;
};

struct HoughDiagnostics {
    int candidates = 0;      // local maxima above threshold
    int after_dedup = 0;
    int after_conflict = 0;
    int dropped_gray = 0;
    int dropped_border = 0;
};

double mean_gray_in_circle(const GrayImage& img, double cx, double cy, int r);

std::vector<CircleHit> detect_eggs_hough(const GrayImage& img, const HoughParams& p,
                                         HoughDiagnostics* diag = nullptr);

// --- tracking ----------------------------------------------------------------------

struct TrackParams {
    int search_window = 4;
    int max_border_run = 5;  // consecutive border maxima tolerated
};

struct TrackedEgg {
    int egg_id = 0;
    int radius = 0;
    std::vector<int> cx;  // per frame
    std::vector<int> cy;
    std::vector<std::uint8_t> frame_valid;
    bool valid = true;
};

// Ring-template correlation on a local gradient-magnitude map.
std::vector<TrackedEgg> track_eggs(const ImageStream& stream,
                                   const std::vector<CircleHit>& initial,
                                   const TrackParams& p = {});

// Correlation of the ring template (round(d) in {r-1, r, r+1}) centred at
// (cx, cy) against a gradient map; exposed for tests.
double ring_score(const RealImage& grad, int cx, int cy, int r);

// --- alignment and differences ---------------------------------------------------

struct Shift {
    int dx = 0;
    int dy = 0;
    std::uint64_t sad = 0;
    bool on_border = false;
};

// Integer shift of cur against prev minimizing the SAD over the central
// region (pixels at least max_shift from the border). Ties: smallest
// |dx|+|dy|, then lexicographic (dx, dy).
Shift fine_align(const GrayImage& prev, const GrayImage& cur, int max_shift);
// Same, restricted to the disc (cx, cy, r) of prev.
Shift fine_align_disc(const GrayImage& prev, const GrayImage& cur, int max_shift, int cx,
                      int cy, int r);

GrayImage difference_image(const GrayImage& a, const GrayImage& b);

// Zero pixels outside the disc (x-cx)^2 + (y-cy)^2 <= r^2.
GrayImage roi_mask_circle(const GrayImage& crop, int cx, int cy, int r);

}  // namespace platescreen::segment
