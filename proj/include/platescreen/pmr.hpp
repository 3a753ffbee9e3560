#pragma once

#include <climits>
#include <string>
#include <vector>

namespace platescreen::pmr {

enum class EventKind { coiling, swimming };
const char* to_string(EventKind k);

// Frames are 0-based and inclusive.
struct PmrEvent {
    int egg_id = 0;
    EventKind kind = EventKind::coiling;
    int start_frame = 0;
    int end_frame = 0;
    double peak_value = 0.0;

    int duration() const { return end_frame - start_frame + 1; }
};

struct Thresholds {
    double peak = 0.0;
    double extent = 0.0;
};

inline constexpr double kReferenceRate = 30.03;
inline constexpr int kReferenceCoilingMax = 40;

// 40 frames at the reference rate, scaled to other rates.
int coiling_max_frames(double frame_rate_hz);

// median + k * 1.4826 * MAD over the non-gap samples in [begin, end).
// The spread is floored at min_spread so a perfectly flat baseline still
// yields peak > extent > median.
Thresholds baseline_thresholds(const std::vector<double>& series, int begin, int end,
                               double peak_k = 5.0, double extent_k = 2.0,
                               double min_spread = 1e-6);

// Runs above the extent threshold that contain at least one sample above the
// peak threshold. NaN samples split runs. Throws InvalidArgumentError when
// peak < extent.
std::vector<PmrEvent> classify_events(const std::vector<double>& series, int egg_id,
                                      const Thresholds& t, int coiling_max);

struct ProbabilityCurves {
    std::vector<double> coiling;
    std::vector<double> swimming;
};

// Fraction of eggs with an event of each kind covering frame k.
ProbabilityCurves event_probability_curves(const std::vector<PmrEvent>& events, int n_eggs,
                                           int n_frames);

struct PmrPhases {
    double reaction_s;     // NaN when absent
    double excitation1_s;
    double excitation2_s;
};

// Phases after the stimulus onset; only events starting in [stimulus, until)
// count. `events` holds one egg's events.
PmrPhases phase_durations(const std::vector<PmrEvent>& events, int stimulus_frame,
                          double frame_rate_hz, int until = INT_MAX);

// Coiling events starting in [begin, end) per egg per second.
double coiling_rate(const std::vector<PmrEvent>& events, int begin, int end, int n_eggs,
                    double frame_rate_hz);

struct EventCounters {
    long coiling_events = 0;
    long swimming_events = 0;
    long coiling_frames = 0;
    long swimming_frames = 0;
};
EventCounters count_events(const std::vector<PmrEvent>& events);

std::string events_csv(const std::vector<PmrEvent>& events);
std::string curves_csv(const ProbabilityCurves& c);
// eggs x frames matrix; gaps written as empty cells
std::string heatmap_csv(const std::vector<std::vector<double>>& series);

}  // namespace platescreen::pmr
