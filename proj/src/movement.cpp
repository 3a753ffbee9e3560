#include <algorithm>
#include <cmath>

#include "platescreen/features.hpp"
#include "platescreen/kernels.hpp"

namespace platescreen::features {

std::vector<double> movement_index(const segment::TrackedEgg& egg, const ImageStream& stream,
                                   const MovementParams& p) {
    const auto& src = stream.source_frames();
    int total = src.empty() ? 0 : src.back() + 1;
    for (int d : stream.dropped_frames()) total = std::max(total, d + 1);
    std::vector<double> out(total, kGap);
    if (static_cast<int>(egg.cx.size()) != stream.n_frames())
        throw DimensionError("trajectory length does not match the stream");

    const int r = egg.radius, m = p.max_shift;
    const int half = r + m;
    const int side = 2 * half + 1;
    for (int k = 1; k < stream.n_frames(); ++k) {
        if (src[k] != src[k - 1] + 1) continue;
        if (!egg.frame_valid[k] || !egg.frame_valid[k - 1]) continue;
        const GrayImage prev =
            crop_clamped(stream.at(k - 1), egg.cx[k - 1] - half, egg.cy[k - 1] - half, side, side);
        const GrayImage cur =
            crop_clamped(stream.at(k), egg.cx[k] - half, egg.cy[k] - half, side, side);
        const auto shift = segment::fine_align_disc(prev, cur, m, half, half, r);
        if (shift.on_border) continue;

        // Sum of |cur(x+dx, y+dy) - prev(x, y)| over the ROI disc, normalized
        // by the intensity spread of the current ROI.
        double sum = 0, s1 = 0, s2 = 0;
        std::size_t n = 0;
        for (int y = half - r; y <= half + r; ++y) {
            const int dy = y - half;
            const int hw = static_cast<int>(std::floor(std::sqrt(double(r) * r - dy * dy)));
            const int x0 = half - hw, len = 2 * hw + 1;
            sum += static_cast<double>(kernels::active().sad(
                prev.row(y) + x0, cur.row(y + shift.dy) + x0 + shift.dx, std::size_t(len)));
            const auto mo = kernels::active().moments(cur.row(y + shift.dy) + x0 + shift.dx,
                                                      std::size_t(len));
            s1 += static_cast<double>(mo.sum);
            s2 += static_cast<double>(mo.sum_sq);
            n += static_cast<std::size_t>(len);
        }
        const double mean = s1 / n;
        const double var = n > 1 ? std::max(0.0, (s2 - s1 * mean) / (n - 1)) : 0.0;
        const double sd = std::sqrt(var);
        out[src[k]] = sd > 0 ? sum / sd : kGap;
    }
    return out;
}

}  // namespace platescreen::features
