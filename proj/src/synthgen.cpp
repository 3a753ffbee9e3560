#include "platescreen/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "platescreen/kernels.hpp"

namespace platescreen::synth {

namespace {

constexpr double kCoilingStep = 0.5;    // radians per frame
constexpr double kSwimmingStep = 0.12;  // radians, alternating sign
constexpr std::size_t kNoiseSlack = 1 << 16;

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

double well_radius(const SynthScript& s) {
    return s.well_radius > 0 ? s.well_radius : std::min(s.width, s.height) / 2.0;
}

// Multiplicative factor map of one egg in local coordinates, side 2r+3.
struct EggState {
    double orientation = 0.0;
    int heart_phase = 0;
    bool operator==(const EggState&) const = default;
};

Grid<float> egg_factors(const SynthScript& s, const EggSpec& egg, const EggState& st) {
    const int r = egg.radius;
    const int side = 2 * r + 3;
    const int c = r + 1;
    Grid<float> f(side, side, 1.0f);
    const double cs = std::cos(st.orientation), sn = std::sin(st.orientation);
    const double a = 0.6 * r, b = 0.3 * r;
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) {
            const double dx = i - c, dy = j - c;
            const double d = std::hypot(dx, dy);
            double v = 1.0;
            if (std::abs(d - r) < 1.0) {
                v = s.chorion_factor;
            } else if (d < r) {
                switch (egg.appearance) {
                    case Appearance::empty_ring: v = 1.0; break;
                    case Appearance::coagulated:
                        v = d <= 0.7 * r ? s.coagulated_factor : s.interior_factor;
                        break;
                    case Appearance::developed: {
                        v = s.interior_factor;
                        const double u = cs * dx + sn * dy;
                        const double w = -sn * dx + cs * dy;
                        if ((u / a) * (u / a) + (w / b) * (w / b) <= 1.0) v = s.larva_factor;
                        if (std::hypot(u - 0.45 * r, w) <= 0.2 * r) v = s.larva_factor * 0.75;
                        if (egg.heartbeat && std::hypot(u - 0.2 * r, w - 0.18 * r) <= 0.12 * r)
                            v = s.larva_factor * (st.heart_phase ? 0.55 : 1.0);
                        break;
                    }
                }
            }
            f(i, j) = static_cast<float>(v);
        }
    return f;
}

void validate(const SynthScript& s) {
    if (s.width < 8 || s.height < 8) throw InvalidArgumentError("image too small");
    if (s.n_frames < 1) throw InvalidArgumentError("n_frames must be >= 1");
    if (s.r_min < 3 || s.r_min > s.r_max) throw InvalidArgumentError("bad radius range");
    if (s.noise_sigma < 0 || s.drift_px_per_frame < 0)
        throw InvalidArgumentError("negative noise or drift");
    for (std::size_t i = 0; i < s.eggs.size(); ++i)
        for (std::size_t j = i + 1; j < s.eggs.size(); ++j) {
            const auto& a = s.eggs[i];
            const auto& b = s.eggs[j];
            if (std::hypot(a.cx - b.cx, a.cy - b.cy) <= a.radius + b.radius)
                throw InvalidArgumentError("eggs overlap at spawn");
        }
    for (const auto& w : s.stimulus_windows)
        if (w.first > w.second) throw InvalidArgumentError("empty stimulus window");
}

std::vector<EggSpec> place_eggs(const SynthScript& s) {
    if (!s.eggs.empty() || s.n_eggs == 0) return s.eggs;
    if (s.n_eggs < 0) throw InvalidArgumentError("negative egg count");
    auto rng = stream_rng(s.seed, 1);
    std::uniform_int_distribution<int> rad(s.r_min, s.r_max);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    const double R = well_radius(s);
    const double cx0 = (s.width - 1) / 2.0, cy0 = (s.height - 1) / 2.0;
    const int wander = s.drift_px_per_frame > 0 ? s.max_wander_px : 0;
    // Keep neighbours apart by at least 0.9 of the largest diameter so the
    // detector's duplicate rule never sees a true pair as one egg.
    const double min_gap = std::ceil(1.8 * s.r_max) + 2 + 2 * wander;

    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<EggSpec> eggs;
        for (int k = 0; k < s.n_eggs; ++k) {
            const int r = rad(rng);
            const int margin = r + 2 + wander;
            if (2 * margin >= s.width || 2 * margin >= s.height) break;
            std::uniform_int_distribution<int> px(margin, s.width - 1 - margin);
            std::uniform_int_distribution<int> py(margin, s.height - 1 - margin);
            bool placed = false;
            for (int t = 0; t < 400 && !placed; ++t) {
                const int x = px(rng), y = py(rng);
                if (std::hypot(x - cx0, y - cy0) > R - r) continue;
                bool ok = true;
                for (const auto& e : eggs) {
                    const double need = std::max<double>(e.radius + r + s.spacing_px + 2 * wander,
                                                         min_gap);
                    if (std::hypot(e.cx - x, e.cy - y) < need) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                eggs.push_back({x, y, r, s.appearance, ang(rng), s.heartbeat});
                placed = true;
            }
            if (!placed) break;
        }
        if (static_cast<int>(eggs.size()) == s.n_eggs) return eggs;
    }
    throw PlacementError("could not place " + std::to_string(s.n_eggs) +
                         " non-overlapping eggs");
}

}  // namespace

const char* to_string(Appearance a) {
    switch (a) {
        case Appearance::coagulated: return "coagulated";
        case Appearance::empty_ring: return "empty_ring";
        case Appearance::developed: break;
    }
    return "developed";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::coiling: return "coiling";
        case EventKind::swimming: return "swimming";
        case EventKind::none: break;
    }
    return "none";
}

GrayImage render_background(const SynthScript& s) {
    GrayImage bg(s.width, s.height);
    const double R = well_radius(s);
    const double cx0 = (s.width - 1) / 2.0, cy0 = (s.height - 1) / 2.0;
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
            const double t = std::min(std::hypot(x - cx0, y - cy0) / R, 1.0);
            const double v = s.center_intensity - (s.center_intensity - s.rim_intensity) * t * t;
            bg(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    return bg;
}

Rendered render_sequence(const SynthScript& s) {
    validate(s);
    const std::vector<EggSpec> eggs = place_eggs(s);
    const int n_eggs = static_cast<int>(eggs.size());
    for (const auto& ev : s.events) {
        if (ev.egg < 0 || ev.egg >= n_eggs) throw InvalidArgumentError("event for unknown egg");
        if (ev.duration_frames < 1 || ev.start_frame < 0 ||
            ev.start_frame + ev.duration_frames > s.n_frames)
            throw InvalidArgumentError("event interval outside the sequence");
    }

    const GrayImage bg = render_background(s);
    auto drift_rng = stream_rng(s.seed, 2);
    auto noise_rng = stream_rng(s.seed, 3);
    const int step = static_cast<int>(std::floor(s.drift_px_per_frame));
    std::uniform_int_distribution<int> step_dist(-step, step);

    std::vector<std::int16_t> noise_pool;
    std::uniform_int_distribution<std::size_t> offset_dist(0, kNoiseSlack - 1);
    if (s.noise_sigma > 0) {
        std::normal_distribution<double> nd(0.0, s.noise_sigma);
        noise_pool.resize(bg.size() + kNoiseSlack);
        for (auto& v : noise_pool)
            v = static_cast<std::int16_t>(std::clamp(std::lround(nd(noise_rng)), -32000L, 32000L));
    }

    Rendered out;
    GroundTruth& gt = out.truth;
    gt.eggs.resize(n_eggs);
    std::vector<EggState> state(n_eggs);
    std::vector<Grid<float>> maps(n_eggs);
    std::vector<int> px(n_eggs), py(n_eggs);
    for (int e = 0; e < n_eggs; ++e) {
        gt.eggs[e].radius = eggs[e].radius;
        gt.eggs[e].appearance = eggs[e].appearance;
        state[e].orientation = eggs[e].orientation;
        maps[e] = egg_factors(s, eggs[e], state[e]);
        px[e] = eggs[e].cx;
        py[e] = eggs[e].cy;
    }
    for (const auto& ev : s.events)
        gt.events.push_back(
            {ev.egg, ev.kind, ev.start_frame, ev.start_frame + ev.duration_frames - 1});
    std::sort(gt.events.begin(), gt.events.end(), [](const EventTruth& a, const EventTruth& b) {
        return std::tie(a.egg, a.start_frame) < std::tie(b.egg, b.start_frame);
    });

    std::vector<GrayImage> frames;
    frames.reserve(s.n_frames);
    GrayImage clean(s.width, s.height);
    for (int k = 0; k < s.n_frames; ++k) {
        for (int e = 0; e < n_eggs; ++e) {
            if (k > 0 && step > 0) {
                int dx = step_dist(drift_rng), dy = step_dist(drift_rng);
                if (std::abs(px[e] + dx - eggs[e].cx) > s.max_wander_px) dx = -dx;
                if (std::abs(py[e] + dy - eggs[e].cy) > s.max_wander_px) dy = -dy;
                px[e] += dx;
                py[e] += dy;
            }
            EggState next = state[e];
            for (const auto& ev : s.events) {
                if (ev.egg != e || k < ev.start_frame ||
                    k >= ev.start_frame + ev.duration_frames)
                    continue;
                if (ev.kind == EventKind::coiling) {
                    next.orientation += ev.amplitude > 0 ? ev.amplitude : kCoilingStep;
                } else if (ev.kind == EventKind::swimming) {
                    const double a = ev.amplitude > 0 ? ev.amplitude : kSwimmingStep;
                    next.orientation += ((k - ev.start_frame) % 2 == 0) ? a : -a;
                }
            }
            if (eggs[e].heartbeat && s.heart_period_frames > 0)
                next.heart_phase =
                    static_cast<int>(std::floor(k / (s.heart_period_frames / 2.0))) % 2;
            int moving = 0;
            if (!(next == state[e])) {
                Grid<float> m = egg_factors(s, eggs[e], next);
                for (std::size_t i = 0; i < m.size(); ++i)
                    moving += m.pixels()[i] != maps[e].pixels()[i];
                maps[e] = std::move(m);
                state[e] = next;
            }
            gt.eggs[e].cx.push_back(px[e]);
            gt.eggs[e].cy.push_back(py[e]);
            gt.eggs[e].moving_pixels.push_back(k == 0 ? 0 : moving);
        }

        std::copy(bg.pixels().begin(), bg.pixels().end(), clean.pixels().begin());
        for (int e = 0; e < n_eggs; ++e) {
            const int r = eggs[e].radius;
            const auto& m = maps[e];
            for (int j = 0; j < m.height(); ++j) {
                const int y = py[e] - (r + 1) + j;
                if (y < 0 || y >= s.height) continue;
                for (int i = 0; i < m.width(); ++i) {
                    const int x = px[e] - (r + 1) + i;
                    const float f = m(i, j);
                    if (x < 0 || x >= s.width || f == 1.0f) continue;
                    clean(x, y) = static_cast<std::uint8_t>(bg(x, y) * f + 0.5f);
                }
            }
        }

        GrayImage frame(s.width, s.height);
        if (!noise_pool.empty()) {
            const std::int16_t* nz = noise_pool.data() + offset_dist(noise_rng);
            kernels::active().add_noise(clean.data(), nz, frame.data(), frame.size());
        } else {
            frame = clean;
        }
        for (const auto& w : s.stimulus_windows)
            if (k >= w.first && k <= w.second)
                for (auto& v : frame.pixels()) v = static_cast<std::uint8_t>(std::min(255, 3 * v));
        frames.push_back(std::move(frame));
    }
    out.stream = ImageStream::from_frames(std::move(frames), s.frame_rate_hz);
    return out;
}

}  // namespace platescreen::synth
