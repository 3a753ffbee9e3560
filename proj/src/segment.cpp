#include "platescreen/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "platescreen/kernels.hpp"

namespace platescreen::segment {

namespace {

struct Offset {
    int dx;
    int dy;
};

// round(hypot(dx, dy)) == r, in integers: (2r-1)^2 <= 4 d^2 < (2r+1)^2
std::vector<Offset> circle_offsets(int r) {
    std::vector<Offset> out;
    const long lo = (2L * r - 1) * (2L * r - 1), hi = (2L * r + 1) * (2L * r + 1);
    for (int dy = -r - 1; dy <= r + 1; ++dy)
        for (int dx = -r - 1; dx <= r + 1; ++dx) {
            const long d4 = 4L * (dx * dx + dy * dy);
            if (d4 >= lo && d4 < hi) out.push_back({dx, dy});
        }
    return out;
}

std::vector<Offset> ring_offsets(int r) {
    std::vector<Offset> out;
    for (int rr = std::max(0, r - 1); rr <= r + 1; ++rr) {
        auto o = circle_offsets(rr);
        out.insert(out.end(), o.begin(), o.end());
    }
    return out;
}

// Largest 8-connected component of mask==1; returns its pixel indices.
std::vector<int> largest_component(const Mask& m) {
    const int w = m.width(), h = m.height();
    std::vector<int> label(m.size(), 0);
    std::vector<int> best, cur, stack;
    int next = 0;
    for (int start = 0; start < static_cast<int>(m.size()); ++start) {
        if (!m.pixels()[start] || label[start]) continue;
        ++next;
        cur.clear();
        stack.assign(1, start);
        label[start] = next;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            cur.push_back(idx);
            const int x = idx % w, y = idx / w;
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i) {
                    const int nx = x + i, ny = y + j;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const int n = ny * w + nx;
                    if (m.pixels()[n] && !label[n]) {
                        label[n] = next;
                        stack.push_back(n);
                    }
                }
        }
        if (cur.size() > best.size()) best = cur;
    }
    return best;
}

}  // namespace

double roundness(const Mask& c) {
    std::size_t area = 0, edges = 0;
    for (int y = 0; y < c.height(); ++y)
        for (int x = 0; x < c.width(); ++x) {
            if (!c(x, y)) continue;
            ++area;
            edges += !(c.contains(x + 1, y) && c(x + 1, y));
            edges += !(c.contains(x - 1, y) && c(x - 1, y));
            edges += !(c.contains(x, y + 1) && c(x, y + 1));
            edges += !(c.contains(x, y - 1) && c(x, y - 1));
        }
    if (area == 0) return 0.0;
    const double perimeter = edges * std::numbers::pi / 4.0;
    return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

SingleEggResult segment_single_egg(const GrayImage& img, const SingleEggParams& p) {
    if (p.max_iter < 1) throw InvalidArgumentError("max_iter must be >= 1");
    SingleEggResult res;
    const double lo_area = p.target_area_px * (1 - p.tol_pct / 100.0);
    const double hi_area = p.target_area_px * (1 + p.tol_pct / 100.0);
    int lo = 0, hi = 255;
    Mask fg(img.width(), img.height());
    for (int it = 1; it <= p.max_iter && lo <= hi; ++it) {
        const int t = (lo + hi) / 2;
        res.iterations = it;
        for (std::size_t i = 0; i < img.size(); ++i) fg.pixels()[i] = img.pixels()[i] <= t;
        const auto comp = largest_component(fg);
        const double area = static_cast<double>(comp.size());
        if (area < lo_area) {
            lo = t + 1;
            continue;
        }
        if (area > hi_area) {
            hi = t - 1;
            continue;
        }
        Mask m(img.width(), img.height(), 0);
        int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
        double sx = 0, sy = 0;
        for (int idx : comp) {
            const int x = idx % img.width(), y = idx / img.width();
            m(x, y) = 1;
            x0 = std::min(x0, x), y0 = std::min(y0, y), x1 = std::max(x1, x), y1 = std::max(y1, y);
            sx += x, sy += y;
        }
        res.threshold = t;
        res.area = area;
        res.roundness = roundness(m);
        res.cx = sx / area;
        res.cy = sy / area;
        res.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        res.mask = std::move(m);
        res.valid = res.roundness >= p.roundness_min;
        break;
    }
    if (!res.valid) res.mask = Mask(img.width(), img.height(), 0);
    return res;
}

double mean_gray_in_circle(const GrayImage& img, double cx, double cy, int r) {
    double sum = 0;
    std::size_t n = 0;
    const int x0 = static_cast<int>(std::floor(cx - r)), x1 = static_cast<int>(std::ceil(cx + r));
    const int y0 = static_cast<int>(std::floor(cy - r)), y1 = static_cast<int>(std::ceil(cy + r));
    for (int y = std::max(0, y0); y <= std::min(img.height() - 1, y1); ++y)
        for (int x = std::max(0, x0); x <= std::min(img.width() - 1, x1); ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= double(r) * r) {
                sum += img(x, y);
                ++n;
            }
    return n ? sum / n : 0.0;
}

std::vector<CircleHit> detect_eggs_hough(const GrayImage& img, const HoughParams& p,
                                         HoughDiagnostics* diag) {
    if (p.r_min > p.r_max || p.r_min < 1) throw InvalidArgumentError("bad radius range");
    HoughDiagnostics d;
    const int w = img.width(), h = img.height();
    const Mask edge = edges::canny(img, p.canny);

    // Votes for radii r_min-1 .. r_max+1 so that every reported radius has
    // both neighbours in the radial window.
    const int r_lo = std::max(1, p.r_min - 1), r_hi = p.r_max + 1;
    const int nr = r_hi - r_lo + 1;
    const std::size_t plane = static_cast<std::size_t>(w) * h;
    std::vector<std::uint16_t> acc(plane * nr, 0);
    std::vector<std::vector<Offset>> offs(nr);
    for (int k = 0; k < nr; ++k) offs[k] = circle_offsets(r_lo + k);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!edge(x, y)) continue;
            for (int k = 0; k < nr; ++k) {
                std::uint16_t* a = acc.data() + plane * k;
                for (const auto& o : offs[k]) {
                    const int cx = x + o.dx, cy = y + o.dy;
                    if (cx < 0 || cy < 0 || cx >= w || cy >= h) continue;
                    ++a[static_cast<std::size_t>(cy) * w + cx];
                }
            }
        }

    // Radial window sum A'(r) = A(r-1) + A(r) + A(r+1)
    const int ns = p.r_max - p.r_min + 1;
    std::vector<int> win(plane * ns, 0);
    for (int s = 0; s < ns; ++s) {
        const int r = p.r_min + s;
        for (int rr = r - 1; rr <= r + 1; ++rr) {
            if (rr < r_lo || rr > r_hi) continue;
            const std::uint16_t* a = acc.data() + plane * (rr - r_lo);
            int* o = win.data() + plane * s;
            for (std::size_t i = 0; i < plane; ++i) o[i] += a[i];
        }
    }

    std::vector<CircleHit> cand;
    std::vector<std::size_t> cand_pos;
    for (int s = 0; s < ns; ++s)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t pos = plane * s + static_cast<std::size_t>(y) * w + x;
                const int v = win[pos];
                if (v < p.accum_threshold || v <= 0) continue;
                bool peak = true;
                for (int ds = -1; ds <= 1 && peak; ++ds)
                    for (int dy = -1; dy <= 1 && peak; ++dy)
                        for (int dx = -1; dx <= 1 && peak; ++dx) {
                            if (!ds && !dy && !dx) continue;
                            const int s2 = s + ds, y2 = y + dy, x2 = x + dx;
                            if (s2 < 0 || s2 >= ns || y2 < 0 || y2 >= h || x2 < 0 || x2 >= w)
                                continue;
                            const std::size_t q =
                                plane * s2 + static_cast<std::size_t>(y2) * w + x2;
                            // plateaus resolve to the first cell in scan order
                            peak = q < pos ? v > win[q] : v >= win[q];
                        }
                if (!peak) continue;
                cand.push_back({double(x), double(y), p.r_min + s, double(v), 0.0});
                cand_pos.push_back(pos);
            }
    d.candidates = static_cast<int>(cand.size());

    std::vector<std::size_t> order(cand.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cand[a].score != cand[b].score) return cand[a].score > cand[b].score;
        return cand_pos[a] < cand_pos[b];
    });
    std::vector<CircleHit> hits;
    const double dedup = p.r_min / 2.0;
    for (std::size_t i : order) {
        bool dup = false;
        for (const auto& a : hits)
            dup = dup || std::hypot(a.cx - cand[i].cx, a.cy - cand[i].cy) < dedup;
        if (!dup) hits.push_back(cand[i]);
    }
    d.after_dedup = static_cast<int>(hits.size());
    for (auto& c : hits) c.mean_gray = mean_gray_in_circle(img, c.cx, c.cy, c.r);

    if (hits.size() > 1) {
        std::vector<int> radii;
        for (const auto& c : hits) radii.push_back(c.r);
        std::sort(radii.begin(), radii.end());
        const std::size_t m = radii.size();
        const double r_typ = m % 2 ? radii[m / 2] : 0.5 * (radii[m / 2 - 1] + radii[m / 2]);
        const double min_dist = p.conflict_factor * 2.0 * r_typ;
        for (;;) {
            double best = min_dist;
            int bi = -1, bj = -1;
            for (std::size_t i = 0; i < hits.size(); ++i)
                for (std::size_t j = i + 1; j < hits.size(); ++j) {
                    const double dd = std::hypot(hits[i].cx - hits[j].cx, hits[i].cy - hits[j].cy);
                    if (dd < best) best = dd, bi = int(i), bj = int(j);
                }
            if (bi < 0) break;
            // the brighter of two overlapping circles is the spurious one
            const int drop = hits[bj].mean_gray > hits[bi].mean_gray ? bj : bi;
            hits.erase(hits.begin() + drop);
        }
    }
    d.after_conflict = static_cast<int>(hits.size());

    if (p.gates) {
        std::vector<CircleHit> kept;
        for (const auto& c : hits) {
            if (c.cx - c.r < 0 || c.cy - c.r < 0 || c.cx + c.r > w - 1 || c.cy + c.r > h - 1) {
                ++d.dropped_border;
                continue;
            }
            if (c.mean_gray < p.gray_lo || c.mean_gray > p.gray_hi) {
                ++d.dropped_gray;
                continue;
            }
            kept.push_back(c);
        }
        hits = std::move(kept);
    }
    if (diag) *diag = d;
    return hits;
}

double ring_score(const RealImage& grad, int cx, int cy, int r) {
    double s = 0;
    for (const auto& o : ring_offsets(r)) s += grad.clamped(cx + o.dx, cy + o.dy);
    return s;
}

std::vector<TrackedEgg> track_eggs(const ImageStream& stream,
                                   const std::vector<CircleHit>& initial, const TrackParams& p) {
    if (p.search_window < 1) throw InvalidArgumentError("search_window must be >= 1");
    const int w = p.search_window;
    std::vector<TrackedEgg> out;
    for (std::size_t e = 0; e < initial.size(); ++e) {
        TrackedEgg t;
        t.egg_id = static_cast<int>(e);
        t.radius = initial[e].r;
        const auto ring = ring_offsets(t.radius);
        int px = static_cast<int>(std::lround(initial[e].cx));
        int py = static_cast<int>(std::lround(initial[e].cy));
        const int half = t.radius + 2 + w;
        const int side = 2 * half + 1;
        int border_run = 0;
        for (int k = 0; k < stream.n_frames(); ++k) {
            if (k == 0) {
                t.cx.push_back(px);
                t.cy.push_back(py);
                t.frame_valid.push_back(1);
                continue;
            }
            const GrayImage crop = crop_clamped(stream.at(k), px - half, py - half, side, side);
            const RealImage grad = edges::sobel(convert<double>(crop)).mag;
            double best = -1;
            int bdx = 0, bdy = 0;
            for (int dy = -w; dy <= w; ++dy)
                for (int dx = -w; dx <= w; ++dx) {
                    double s = 0;
                    const int cx = half + dx, cy = half + dy;
                    for (const auto& o : ring) s += grad(cx + o.dx, cy + o.dy);
                    const auto key = std::make_tuple(std::abs(dx) + std::abs(dy), dx, dy);
                    const auto bkey = std::make_tuple(std::abs(bdx) + std::abs(bdy), bdx, bdy);
                    if (s > best || (s == best && key < bkey)) {
                        best = s;
                        bdx = dx;
                        bdy = dy;
                    }
                }
            px += bdx;
            py += bdy;
            const bool border = std::abs(bdx) == w || std::abs(bdy) == w;
            border_run = border ? border_run + 1 : 0;
            if (border_run > p.max_border_run) t.valid = false;
            t.cx.push_back(px);
            t.cy.push_back(py);
            t.frame_valid.push_back(border ? 0 : 1);
        }
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

template <typename RowRange>
Shift align_impl(const GrayImage& prev, const GrayImage& cur, int m, RowRange rows) {
    if (!prev.same_shape(cur)) throw DimensionError("fine_align needs equal crop sizes");
    if (m < 0) throw InvalidArgumentError("max_shift must be >= 0");
    Shift best{0, 0, ~std::uint64_t{0}, false};
    const auto& k = kernels::active();
    for (int dy = -m; dy <= m; ++dy)
        for (int dx = -m; dx <= m; ++dx) {
            std::uint64_t s = 0;
            for (int y = m; y < prev.height() - m; ++y) {
                const auto [x0, x1] = rows(y);
                if (x1 < x0) continue;
                s += k.sad(prev.row(y) + x0, cur.row(y + dy) + x0 + dx, std::size_t(x1 - x0 + 1));
            }
            const auto key = std::make_tuple(s, std::abs(dx) + std::abs(dy), dx, dy);
            const auto bkey =
                std::make_tuple(best.sad, std::abs(best.dx) + std::abs(best.dy), best.dx, best.dy);
            if (key < bkey) best = {dx, dy, s, false};
        }
    best.on_border = m > 0 && (std::abs(best.dx) == m || std::abs(best.dy) == m);
    return best;
}

}  // namespace

Shift fine_align(const GrayImage& prev, const GrayImage& cur, int max_shift) {
    const int x0 = max_shift, x1 = prev.width() - 1 - max_shift;
    return align_impl(prev, cur, max_shift, [=](int) { return std::pair{x0, x1}; });
}

Shift fine_align_disc(const GrayImage& prev, const GrayImage& cur, int max_shift, int cx,
                      int cy, int r) {
    const int m = max_shift, W = prev.width();
    return align_impl(prev, cur, max_shift, [=](int y) {
        const int dy = y - cy;
        if (dy * dy > r * r) return std::pair{1, 0};
        const int hw = static_cast<int>(std::floor(std::sqrt(double(r) * r - dy * dy)));
        return std::pair{std::max(cx - hw, m), std::min(cx + hw, W - 1 - m)};
    });
}

GrayImage difference_image(const GrayImage& a, const GrayImage& b) {
    if (!a.same_shape(b)) throw DimensionError("difference_image needs equal dimensions");
    GrayImage out(a.width(), a.height());
    kernels::absdiff(a.pixels(), b.pixels(), out.pixels());
    return out;
}

GrayImage roi_mask_circle(const GrayImage& crop, int cx, int cy, int r) {
    GrayImage out = crop;
    for (int y = 0; y < crop.height(); ++y)
        for (int x = 0; x < crop.width(); ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) out(x, y) = 0;
    return out;
}

}  // namespace platescreen::segment
