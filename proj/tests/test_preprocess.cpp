#include <doctest.h>

#include <cmath>

#include "platescreen/edges.hpp"
#include "platescreen/preprocess.hpp"
#include "test_util.hpp"

using namespace platescreen;
namespace pp = platescreen::preprocess;

namespace {

ImageStream numbered(int n) {
    std::vector<GrayImage> f;
    for (int k = 0; k < n; ++k) f.push_back(GrayImage(2, 2, static_cast<std::uint8_t>(k % 256)));
    return ImageStream::from_frames(std::move(f), 30.03);
}

}  // namespace

TEST_CASE("frame selection keeps provenance") {
    const auto s = numbered(10);
    const auto a = pp::select_frames(s, {7, 2, 2, 5});
    CHECK(a.n_frames() == 3);
    CHECK(a.source_frames() == std::vector<int>{2, 5, 7});
    CHECK(a.at(2)(0, 0) == 7);
    const auto b = pp::select_frames(a, {0, 2});
    CHECK(b.source_frames() == std::vector<int>{2, 7});
    CHECK(b.dropped_frames() == std::vector<int>{0, 1, 3, 4, 5, 6, 8, 9});
    CHECK_THROWS_AS(pp::select_frames(s, {}), EmptySelectionError);
    CHECK_THROWS_AS(pp::select_frames(s, {10}), DimensionError);
}

TEST_CASE("PMR drop rule on a 1000-frame run") {
    const auto s = pp::drop_frames(numbered(1000), pp::pmr_drop_rule());
    // 3 + 51 + 51 frames removed, 0-based inclusive windows
    CHECK(s.n_frames() == 895);
    CHECK(s.source_frames().front() == 3);
    for (int k : s.source_frames()) {
        CHECK_FALSE((k >= 249 && k <= 299));
        CHECK_FALSE((k >= 649 && k <= 699));
    }
}

TEST_CASE("bright frames are found against the reference median") {
    std::vector<GrayImage> f(20, GrayImage(3, 3, 100));
    f[12] = GrayImage(3, 3, 200);
    f[15] = GrayImage(3, 3, 124);
    const auto s = ImageStream::from_frames(f);
    CHECK(pp::bright_frames(s) == std::vector<int>{12});
}

TEST_CASE("to_gray averages channels") {
    std::vector<GrayImage> imgs{GrayImage(2, 1, 10), GrayImage(2, 1, 20), GrayImage(2, 1, 31)};
    const auto g = pp::to_gray(ImageStream(imgs, 1, 1, 3));
    CHECK(g.n_channels() == 1);
    CHECK(g.at(0)(1, 0) == 20);  // 61/3 = 20.33
}

TEST_CASE("affine normalization") {
    GrayImage img(4, 1);
    img(0, 0) = 0, img(1, 0) = 2, img(2, 0) = 4, img(3, 0) = 6;
    const auto p = pp::affine_params(img, pp::AffineMode::mean_std);
    CHECK(p.q == doctest::Approx(3.0));
    CHECK(p.v == doctest::Approx(std::sqrt(20.0 / 3.0)));
    const auto r = pp::normalize_affine(img, pp::AffineMode::min_range);
    CHECK(r(3, 0) == doctest::Approx(1.0));
    CHECK(r(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(pp::normalize_affine(GrayImage(3, 3, 5), pp::AffineMode::mean_std),
                    DegenerateSpreadError);
}

TEST_CASE("property: mean/std normalization gives zero mean and unit spread") {
    std::mt19937 rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto img = testutil::random_image(1 + t % 13, 2 + t % 7, rng);
        const auto p = pp::affine_params(img, pp::AffineMode::mean_std);
        if (p.v == 0) continue;
        const auto r = pp::normalize_affine(img, p.q, p.v);
        const auto q = pp::affine_params(r, pp::AffineMode::mean_std);
        CHECK(q.q == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
        CHECK(q.v == doctest::Approx(1.0));
    }
}

TEST_CASE("nearest-rank percentile") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(pp::percentile(v, 0) == 1);
    CHECK(pp::percentile(v, 10) == 1);
    CHECK(pp::percentile(v, 11) == 2);
    CHECK(pp::percentile(v, 50) == 5);
    CHECK(pp::percentile(v, 100) == 10);
    CHECK_THROWS_AS(pp::percentile(std::vector<double>{}, 5), NoDataError);
    GrayImage g(10, 1);
    for (int i = 0; i < 10; ++i) g(i, 0) = static_cast<std::uint8_t>(i + 1);
    CHECK(pp::percentile_u8(g, 50) == 5);
}

TEST_CASE("saturating normalization clips to [0, 1]") {
    GrayImage g(100, 1);
    for (int i = 0; i < 100; ++i) g(i, 0) = static_cast<std::uint8_t>(i);
    const auto r = pp::normalize_saturating(g, 2, 98);
    CHECK(r(0, 0) == 0.0);
    CHECK(r(99, 0) == 1.0);
    CHECK(r(50, 0) == doctest::Approx((50.0 - 1) / (97 - 1)));
    CHECK_THROWS_AS(pp::normalize_saturating(g, 50, 10), InvalidArgumentError);
    CHECK(pp::requantize(r)(99, 0) == 255);
}

TEST_CASE("gaussian smoothing preserves constants and mass") {
    const auto k = pp::gaussian_kernel3(0.8);
    double s = 0;
    for (double v : k) s += v;
    CHECK(s == doctest::Approx(1.0));
    CHECK(k[4] > k[1]);
    const auto c = pp::gaussian_smooth(GrayImage(5, 5, 42), 1.0);
    for (double v : c.pixels()) CHECK(v == doctest::Approx(42.0));
    CHECK_THROWS_AS(pp::gaussian_kernel3(0.0), InvalidArgumentError);
}

TEST_CASE("sharpest plane wins") {
    std::mt19937 rng(2);
    const GrayImage flat(16, 16, 128);
    const auto sharp = testutil::random_image(16, 16, rng);
    std::vector<GrayImage> planes{flat, sharp, flat};
    CHECK(pp::select_sharpest_plane(planes) == 1);
    const auto s = pp::sharpest_planes(ImageStream(planes, 1, 3, 1));
    CHECK(s.n_planes() == 1);
    CHECK(s.at(0) == sharp);
}

TEST_CASE("edge detectors find a step and nothing on flat input") {
    GrayImage step(20, 20, 50);
    for (int y = 0; y < 20; ++y)
        for (int x = 10; x < 20; ++x) step(x, y) = 200;
    const auto e = edges::canny(step);
    for (int y = 0; y < 20; ++y) CHECK((e(9, y) || e(10, y)));
    CHECK(edges::count(edges::canny(GrayImage(8, 8, 3))) == 0);
    CHECK(edges::count(edges::log_edges(GrayImage(8, 8, 3))) == 0);
    CHECK(edges::count(edges::log_edges(step)) >= 20);

    double sum = 0;
    for (double v : edges::log_kernel5(1.0)) sum += v;
    CHECK(sum == doctest::Approx(0.0).scale(1.0));
}
