#include <doctest.h>

#include <cmath>

#include "platescreen/features.hpp"
#include "platescreen/segment.hpp"
#include "platescreen/synthgen.hpp"
#include "test_util.hpp"

using namespace platescreen;
namespace sg = platescreen::segment;

namespace {

Mask disc(int w, int h, int cx, int cy, int r) {
    Mask m(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m(x, y) = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
    return m;
}

}  // namespace

TEST_CASE("roundness separates discs from bars") {
    CHECK(sg::roundness(disc(80, 80, 40, 40, 30)) > 0.9);
    CHECK(sg::roundness(disc(80, 80, 40, 40, 30)) < 1.1);
    Mask bar(80, 10, 0);
    for (int x = 5; x < 75; ++x)
        for (int y = 3; y < 6; ++y) bar(x, y) = 1;
    CHECK(sg::roundness(bar) < 0.3);
    CHECK(sg::roundness(Mask(4, 4, 0)) == 0.0);
}

TEST_CASE("single egg bisection finds a dark disc") {
    GrayImage img(100, 100, 200);
    const auto m = disc(100, 100, 45, 55, 20);
    for (std::size_t i = 0; i < img.size(); ++i)
        if (m.pixels()[i]) img.pixels()[i] = 60;
    sg::SingleEggParams p;
    p.target_area_px = M_PI * 20 * 20;
    const auto r = sg::segment_single_egg(img, p);
    REQUIRE(r.valid);
    CHECK(r.cx == doctest::Approx(45).epsilon(0.01));
    CHECK(r.cy == doctest::Approx(55).epsilon(0.01));
    CHECK(r.threshold >= 60);
    CHECK(r.threshold < 200);

    p.target_area_px = 50;  // no threshold yields that area
    CHECK_FALSE(sg::segment_single_egg(img, p).valid);
}

TEST_CASE("hough finds rendered eggs and honours the gates") {
    synth::SynthScript s;
    s.n_eggs = 6;
    s.noise_sigma = 5;
    s.seed = 4;
    const auto r = synth::render_sequence(s);
    sg::HoughParams hp;
    sg::HoughDiagnostics diag;
    const auto hits = sg::detect_eggs_hough(r.stream.at(0), hp, &diag);
    CHECK(hits.size() == 6);
    for (const auto& e : r.truth.eggs) {
        bool found = false;
        for (const auto& h : hits)
            found = found || (std::hypot(h.cx - e.cx[0], h.cy - e.cy[0]) <= 2 &&
                              std::abs(h.r - e.radius) <= 2);
        CHECK(found);
    }
    CHECK(diag.candidates >= diag.after_dedup);
    CHECK(diag.after_dedup >= diag.after_conflict);

    // a flat image has no edges and no circles
    CHECK(sg::detect_eggs_hough(GrayImage(120, 120, 128), hp).empty());

    // mean gray gate rejects everything when the window excludes the image
    hp.gray_lo = 250;
    hp.gray_hi = 255;
    CHECK(sg::detect_eggs_hough(r.stream.at(0), hp).empty());
}

TEST_CASE("mean gray in circle") {
    GrayImage img(20, 20, 10);
    img(10, 10) = 110;
    CHECK(sg::mean_gray_in_circle(img, 10, 10, 0) == doctest::Approx(110));
    CHECK(sg::mean_gray_in_circle(img, 10, 10, 1) == doctest::Approx(30));  // 5 pixels
}

TEST_CASE("fine alignment recovers integer shifts") {
    std::mt19937 rng(8);
    const auto big = testutil::random_image(40, 40, rng);
    const auto prev = crop_clamped(big, 10, 10, 20, 20);
    for (int dx = -2; dx <= 2; ++dx)
        for (int dy = -2; dy <= 2; ++dy) {
            const auto cur = crop_clamped(big, 10 + dx, 10 + dy, 20, 20);
            const auto s = sg::fine_align(prev, cur, 3);
            CHECK(s.dx == -dx);
            CHECK(s.dy == -dy);
            CHECK(s.sad == 0);
            CHECK_FALSE(s.on_border);
        }
    const auto far = crop_clamped(big, 13, 10, 20, 20);
    CHECK(sg::fine_align(prev, far, 2).on_border);
    // identical frames prefer the zero shift
    const GrayImage flat(20, 20, 9);
    const auto z = sg::fine_align(flat, flat, 2);
    CHECK(z.dx == 0);
    CHECK(z.dy == 0);
}

TEST_CASE("ROI mask and difference image") {
    const auto m = sg::roi_mask_circle(GrayImage(9, 9, 7), 4, 4, 2);
    CHECK(m(4, 4) == 7);
    CHECK(m(4, 6) == 7);
    CHECK(m(6, 6) == 0);
    GrayImage a(2, 1, 10), b(2, 1, 30);
    CHECK(sg::difference_image(a, b)(1, 0) == 20);
}

TEST_CASE("tracking follows a drifting egg and marks stationary as valid") {
    synth::SynthScript s;
    s.n_eggs = 2;
    s.n_frames = 120;
    s.noise_sigma = 5;
    s.drift_px_per_frame = 2;
    s.max_wander_px = 8;
    s.seed = 12;
    const auto r = synth::render_sequence(s);
    std::vector<sg::CircleHit> init;
    for (const auto& e : r.truth.eggs) init.push_back({double(e.cx[0]), double(e.cy[0]), e.radius});
    const auto t = sg::track_eggs(r.stream, init);
    REQUIRE(t.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(t[i].valid);
        for (int k = 0; k < s.n_frames; ++k) {
            CHECK(std::abs(t[i].cx[k] - r.truth.eggs[i].cx[k]) <= 2);
            CHECK(std::abs(t[i].cy[k] - r.truth.eggs[i].cy[k]) <= 2);
        }
    }
}

TEST_CASE("ring score peaks at the true centre") {
    synth::SynthScript s;
    s.eggs = {{50, 50, 24}};
    s.width = s.height = 100;
    const auto r = synth::render_sequence(s);
    const auto g = edges::sobel(convert<double>(r.stream.at(0))).mag;
    const double centre = sg::ring_score(g, 50, 50, 24);
    CHECK(centre > sg::ring_score(g, 53, 50, 24));
    CHECK(centre > sg::ring_score(g, 50, 46, 24));
}

TEST_CASE("movement index is quiet at rest and rises during an event") {
    synth::SynthScript s;
    s.eggs = {{60, 60, 25}};
    s.width = s.height = 120;
    s.n_frames = 40;
    s.noise_sigma = 3;
    s.events = {{0, 20, 5, synth::EventKind::coiling, 0}};
    const auto r = synth::render_sequence(s);
    const auto t = sg::track_eggs(r.stream, {{60, 60, 25}});
    const auto idx = features::movement_index(t[0], r.stream);
    REQUIRE(idx.size() == 40);
    CHECK(std::isnan(idx[0]));
    double rest = 0;
    for (int k = 1; k < 20; ++k) rest = std::max(rest, idx[k]);
    for (int k = 20; k < 25; ++k) CHECK(idx[k] > 2 * rest);
}
