#include <algorithm>
#include <cmath>
#include <sstream>

#include "platescreen/error.hpp"
#include "platescreen/pmr.hpp"

namespace platescreen::pmr {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* to_string(EventKind k) { return k == EventKind::coiling ? "coiling" : "swimming"; }

int coiling_max_frames(double frame_rate_hz) {
    if (!(frame_rate_hz > 0)) throw InvalidArgumentError("frame rate must be positive");
    return std::max(1, static_cast<int>(std::lround(kReferenceCoilingMax * frame_rate_hz /
                                                    kReferenceRate)));
}

Thresholds baseline_thresholds(const std::vector<double>& series, int begin, int end,
                               double peak_k, double extent_k, double min_spread) {
    std::vector<double> v;
    begin = std::max(begin, 0);
    end = std::min(end, static_cast<int>(series.size()));
    for (int i = begin; i < end; ++i)
        if (!std::isnan(series[static_cast<std::size_t>(i)]))
            v.push_back(series[static_cast<std::size_t>(i)]);
    if (v.empty()) throw NoDataError("no baseline samples");
    const double med = median_of(v);
    for (double& x : v) x = std::abs(x - med);
    const double spread = std::max(1.4826 * median_of(v), min_spread);
    return {med + peak_k * spread, med + extent_k * spread};
}

std::vector<PmrEvent> classify_events(const std::vector<double>& series, int egg_id,
                                      const Thresholds& t, int coiling_max) {
    if (t.peak < t.extent) throw InvalidArgumentError("peak threshold below extent threshold");
    std::vector<PmrEvent> out;
    const int n = static_cast<int>(series.size());
    int i = 0;
    while (i < n) {
        const double v = series[static_cast<std::size_t>(i)];
        if (std::isnan(v) || !(v > t.extent)) {
            ++i;
            continue;
        }
        int j = i;
        double peak = v;
        while (j + 1 < n) {
            const double w = series[static_cast<std::size_t>(j + 1)];
            if (std::isnan(w) || !(w > t.extent)) break;
            peak = std::max(peak, w);
            ++j;
        }
        if (peak > t.peak) {
            PmrEvent e;
            e.egg_id = egg_id;
            e.start_frame = i;
            e.end_frame = j;
            e.peak_value = peak;
            e.kind = e.duration() < coiling_max ? EventKind::coiling : EventKind::swimming;
            out.push_back(e);
        }
        i = j + 1;
    }
    return out;
}

ProbabilityCurves event_probability_curves(const std::vector<PmrEvent>& events, int n_eggs,
                                           int n_frames) {
    if (n_eggs < 1) throw InvalidArgumentError("need at least one egg");
    ProbabilityCurves c;
    c.coiling.assign(static_cast<std::size_t>(n_frames), 0.0);
    c.swimming.assign(static_cast<std::size_t>(n_frames), 0.0);
    // per egg, a frame is counted once even if two events of a kind overlap
    std::vector<int> last_c(static_cast<std::size_t>(n_frames), -1);
    std::vector<int> last_s(static_cast<std::size_t>(n_frames), -1);
    for (const auto& e : events) {
        auto& curve = e.kind == EventKind::coiling ? c.coiling : c.swimming;
        auto& last = e.kind == EventKind::coiling ? last_c : last_s;
        for (int k = std::max(0, e.start_frame); k <= std::min(e.end_frame, n_frames - 1); ++k) {
            if (last[static_cast<std::size_t>(k)] == e.egg_id) continue;
            last[static_cast<std::size_t>(k)] = e.egg_id;
            curve[static_cast<std::size_t>(k)] += 1.0;
        }
    }
    for (auto* v : {&c.coiling, &c.swimming})
        for (double& p : *v) p /= n_eggs;
    return c;
}

PmrPhases phase_durations(const std::vector<PmrEvent>& events, int stimulus_frame,
                          double frame_rate_hz, int until) {
    if (!(frame_rate_hz > 0)) throw InvalidArgumentError("frame rate must be positive");
    const double gap = std::nan("");
    PmrPhases ph{gap, gap, gap};
    std::vector<PmrEvent> post;
    for (const auto& e : events)
        if (e.start_frame >= stimulus_frame && e.start_frame < until) post.push_back(e);
    if (post.empty()) return ph;
    std::sort(post.begin(), post.end(),
              [](const PmrEvent& a, const PmrEvent& b) { return a.start_frame < b.start_frame; });
    ph.reaction_s = (post.front().start_frame - stimulus_frame) / frame_rate_hz;
    double swim = 0.0;
    bool have_swim = false;
    for (const auto& e : post) {
        if (e.kind != EventKind::swimming) continue;
        if (!have_swim) {
            ph.excitation1_s =
                std::max(0, e.start_frame - post.front().end_frame) / frame_rate_hz;
            have_swim = true;
        }
        swim += e.duration();
    }
    ph.excitation2_s = swim / frame_rate_hz;
    return ph;
}

double coiling_rate(const std::vector<PmrEvent>& events, int begin, int end, int n_eggs,
                    double frame_rate_hz) {
    if (end <= begin) throw InvalidArgumentError("empty window");
    if (n_eggs < 1 || !(frame_rate_hz > 0)) throw InvalidArgumentError("bad cohort size or rate");
    long n = 0;
    for (const auto& e : events)
        if (e.kind == EventKind::coiling && e.start_frame >= begin && e.start_frame < end) ++n;
    return static_cast<double>(n) / (n_eggs * ((end - begin) / frame_rate_hz));
}

EventCounters count_events(const std::vector<PmrEvent>& events) {
    EventCounters c;
    for (const auto& e : events) {
        if (e.kind == EventKind::coiling) {
            ++c.coiling_events;
            c.coiling_frames += e.duration();
        } else {
            ++c.swimming_events;
            c.swimming_frames += e.duration();
        }
    }
    return c;
}

std::string events_csv(const std::vector<PmrEvent>& events) {
    std::ostringstream os;
    os.precision(10);
    os << "egg_id,kind,start,end,peak\n";
    for (const auto& e : events)
        os << e.egg_id << ',' << to_string(e.kind) << ',' << e.start_frame << ','
           << e.end_frame << ',' << e.peak_value << '\n';
    return os.str();
}

std::string curves_csv(const ProbabilityCurves& c) {
    std::ostringstream os;
    os.precision(10);
    os << "frame,p_coiling,p_swimming\n";
    for (std::size_t k = 0; k < c.coiling.size(); ++k)
        os << k << ',' << c.coiling[k] << ',' << c.swimming[k] << '\n';
    return os.str();
}

std::string heatmap_csv(const std::vector<std::vector<double>>& series) {
    std::ostringstream os;
    os.precision(10);
    for (const auto& row : series) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) os << ',';
            if (!std::isnan(row[k])) os << row[k];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace platescreen::pmr
