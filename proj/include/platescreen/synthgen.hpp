#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "platescreen/image_stream.hpp"

namespace platescreen::synth {

enum class Appearance { developed, coagulated, empty_ring };
enum class EventKind { none, coiling, swimming };

const char* to_string(Appearance a);
const char* to_string(EventKind k);

struct EggSpec {
    int cx = 0;
    int cy = 0;
    int radius = 25;
    Appearance appearance = Appearance::developed;
    double orientation = 0.0;  // larva axis, radians
    bool heartbeat = false;
};

// Frames are 0-based; the event covers [start_frame, start_frame + duration - 1].
struct EventSpec {
    int egg = 0;
    int start_frame = 0;
    int duration_frames = 1;
    EventKind kind = EventKind::none;
    double amplitude = 0.0;  // radians per frame; 0 picks the kind's default
};

struct SynthScript {
    int width = 250;
    int height = 250;
    int n_frames = 1;
    double frame_rate_hz = 30.03;

    // Random placement, used when `eggs` is empty.
    int n_eggs = 0;
    int r_min = 20;
    int r_max = 30;
    int spacing_px = 8;  // extra gap between chorions
    Appearance appearance = Appearance::developed;
    bool heartbeat = false;
    std::vector<EggSpec> eggs;

    double drift_px_per_frame = 0.0;  // max per-axis random-walk step
    int max_wander_px = 4;            // bound on distance from spawn per axis

    std::vector<EventSpec> events;
    std::vector<std::pair<int, int>> stimulus_windows;  // inclusive frame ranges

    double center_intensity = 255.0;
    double rim_intensity = 80.0;
    double well_radius = 0.0;  // 0: half the smaller image side

    double chorion_factor = 0.45;
    double interior_factor = 0.8;
    double larva_factor = 0.4;
    double coagulated_factor = 0.25;
    double heart_period_frames = 4.0;

    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
};

struct EggTruth {
    int radius = 0;
    Appearance appearance = Appearance::developed;
    std::vector<int> cx;  // per frame
    std::vector<int> cy;
    // Pixels inside the chorion whose noise-free value changed against the
    // previous frame in egg-local coordinates (larva motion, not drift).
    std::vector<int> moving_pixels;
};

struct EventTruth {
    int egg = 0;
    EventKind kind = EventKind::none;
    int start_frame = 0;
    int end_frame = 0;  // inclusive
};

struct GroundTruth {
    std::vector<EggTruth> eggs;
    std::vector<EventTruth> events;
};

struct Rendered {
    ImageStream stream;
    GroundTruth truth;
};

// Throws PlacementError if random placement fails and InvalidArgumentError on
// malformed scripts.
Rendered render_sequence(const SynthScript& script);

// Background only: radial vignette center -> rim.
GrayImage render_background(const SynthScript& script);

}  // namespace platescreen::synth
