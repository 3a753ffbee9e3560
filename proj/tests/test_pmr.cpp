#include <doctest.h>

#include <cmath>
#include <random>

#include "platescreen/error.hpp"
#include "platescreen/feature_vector.hpp"
#include "platescreen/pmr.hpp"

using namespace platescreen;
using namespace platescreen::pmr;

namespace {

std::vector<double> baseline(int n, double level = 1.0) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = level + 0.1 * ((i * 7) % 5 - 2);  // -0.2 .. 0.2
    return s;
}

void bump(std::vector<double>& s, int start, int len, double v) {
    for (int i = start; i < start + len; ++i) s[i] = v;
}

}  // namespace

TEST_CASE("coiling boundary scales with the frame rate") {
    CHECK(coiling_max_frames(kReferenceRate) == 40);
    CHECK(coiling_max_frames(2 * kReferenceRate) == 80);
    CHECK(coiling_max_frames(0.01) == 1);
    CHECK_THROWS_AS(coiling_max_frames(0), InvalidArgumentError);
}

TEST_CASE("robust thresholds") {
    // median 3, MAD 1
    const std::vector<double> s{1, 2, 3, 4, 5, kGap};
    const auto t = baseline_thresholds(s, 0, 6, 5, 2);
    CHECK(t.peak == doctest::Approx(3 + 5 * 1.4826));
    CHECK(t.extent == doctest::Approx(3 + 2 * 1.4826));
    const auto flat = baseline_thresholds(std::vector<double>(10, 2.0), 0, 10);
    CHECK(flat.peak > flat.extent);
    CHECK(flat.extent > 2.0);
    CHECK_THROWS_AS(baseline_thresholds({kGap, kGap}, 0, 2), NoDataError);
    CHECK_THROWS_AS(baseline_thresholds({1, 2}, 5, 9), NoDataError);
}

TEST_CASE("events need a peak and split on gaps") {
    auto s = baseline(300);
    bump(s, 50, 10, 5.0);                    // coiling
    bump(s, 100, 60, 3.0);                   // swimming
    s[130] = 6.0;                            // peak inside the swim
    bump(s, 200, 5, 1.5);                    // above extent only: ignored
    bump(s, 250, 20, 6.0);
    s[260] = kGap;                           // splits into two coils
    const Thresholds t{2.5, 1.4};
    const auto ev = classify_events(s, 7, t, 40);
    REQUIRE(ev.size() == 4);
    CHECK(ev[0].kind == EventKind::coiling);
    CHECK(ev[0].start_frame == 50);
    CHECK(ev[0].end_frame == 59);
    CHECK(ev[0].egg_id == 7);
    CHECK(ev[1].kind == EventKind::swimming);
    CHECK(ev[1].duration() == 60);
    CHECK(ev[1].peak_value == 6.0);
    CHECK(ev[2].end_frame == 259);
    CHECK(ev[3].start_frame == 261);
    CHECK_THROWS_AS(classify_events(s, 0, {1.0, 2.0}, 40), InvalidArgumentError);
}

TEST_CASE("kind boundary at the coiling limit") {
    auto s = baseline(200);
    bump(s, 10, 39, 5);
    bump(s, 100, 40, 5);
    const auto ev = classify_events(s, 0, {2.5, 1.4}, 40);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].kind == EventKind::coiling);
    CHECK(ev[1].kind == EventKind::swimming);
}

TEST_CASE("property: events are disjoint, ordered and above the extent") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(1.0, 0.3);
    std::uniform_int_distribution<int> pos(0, 900), len(1, 80);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> s(1000);
        for (auto& v : s) v = n(rng);
        for (int b = 0; b < 6; ++b) bump(s, pos(rng), len(rng), 4.0);
        const auto th = baseline_thresholds(s, 0, 1000);
        const auto ev = classify_events(s, 0, th, 40);
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (i) CHECK(ev[i].start_frame > ev[i - 1].end_frame);
            for (int k = ev[i].start_frame; k <= ev[i].end_frame; ++k) CHECK(s[k] > th.extent);
            CHECK(ev[i].peak_value > th.peak);
        }
    }
}

TEST_CASE("probability curves") {
    const std::vector<PmrEvent> ev{{0, EventKind::coiling, 2, 4, 1},
                                   {1, EventKind::coiling, 3, 3, 1},
                                   {1, EventKind::swimming, 5, 9, 1}};
    const auto c = event_probability_curves(ev, 4, 10);
    CHECK(c.coiling[2] == 0.25);
    CHECK(c.coiling[3] == 0.5);
    CHECK(c.coiling[5] == 0.0);
    CHECK(c.swimming[9] == 0.25);
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(c.coiling[k] <= 1.0);
        CHECK(c.swimming[k] <= 1.0);
    }
    CHECK_THROWS_AS(event_probability_curves(ev, 0, 10), InvalidArgumentError);
}

TEST_CASE("phase durations after the stimulus") {
    const double rate = 10.0;
    const std::vector<PmrEvent> ev{{0, EventKind::coiling, 100, 104, 1},   // before
                                   {0, EventKind::coiling, 260, 269, 1},
                                   {0, EventKind::swimming, 290, 339, 1},
                                   {0, EventKind::swimming, 400, 419, 1},
                                   {0, EventKind::coiling, 700, 705, 1}};  // after `until`
    const auto p = phase_durations(ev, 249, rate, 649);
    CHECK(p.reaction_s == doctest::Approx(1.1));
    CHECK(p.excitation1_s == doctest::Approx(2.1));
    CHECK(p.excitation2_s == doctest::Approx(7.0));
    const auto none = phase_durations({}, 249, rate);
    CHECK(std::isnan(none.reaction_s));
    const auto coil_only = phase_durations({ev[1]}, 249, rate);
    CHECK(std::isnan(coil_only.excitation1_s));
    CHECK(coil_only.excitation2_s == 0.0);
}

TEST_CASE("coiling rate and counters") {
    const std::vector<PmrEvent> ev{{0, EventKind::coiling, 10, 14, 1},
                                   {1, EventKind::coiling, 20, 22, 1},
                                   {1, EventKind::swimming, 30, 79, 1},
                                   {2, EventKind::coiling, 150, 151, 1}};
    CHECK(coiling_rate(ev, 0, 100, 2, 10.0) == doctest::Approx(2.0 / (2 * 10.0)));
    CHECK_THROWS_AS(coiling_rate(ev, 5, 5, 2, 10.0), InvalidArgumentError);
    const auto c = count_events(ev);
    CHECK(c.coiling_events == 3);
    CHECK(c.swimming_frames == 50);
    CHECK(c.coiling_frames == 5 + 3 + 2);
}

TEST_CASE("csv exports") {
    const std::vector<PmrEvent> ev{{3, EventKind::swimming, 5, 60, 2.5}};
    CHECK(events_csv(ev) == "egg_id,kind,start,end,peak\n3,swimming,5,60,2.5\n");
    CHECK(heatmap_csv({{1, kGap, 2}}) == "1,,2\n");
    const auto c = curves_csv(event_probability_curves(ev, 1, 2));
    CHECK(c == "frame,p_coiling,p_swimming\n0,0,0\n1,0,0\n");
}
