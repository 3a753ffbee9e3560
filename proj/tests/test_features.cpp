#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "platescreen/features.hpp"
#include "platescreen/kernels.hpp"
#include "test_util.hpp"

using namespace platescreen;
namespace ft = platescreen::features;

namespace {

oracle::Img to_oracle(const GrayImage& g) {
    oracle::Img a(g.height(), std::vector<double>(g.width()));
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x) a[y][x] = g(x, y);
    return a;
}

bool close(double got, double want) {
    if (std::isnan(want) || std::isnan(got)) return std::isnan(want) && std::isnan(got);
    return std::fabs(got - want) <= 1e-9 * std::max(1.0, std::fabs(want));
}

// Random grid; half the time with a zero background outside an ellipse.
GrayImage grid(std::mt19937& rng) {
    std::uniform_int_distribution<int> side(2, 16);
    const int w = side(rng), h = side(rng);
    auto img = testutil::random_image(w, h, rng, 1, 255);
    if (rng() % 2) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double dx = (x - w / 2.0) / (w / 2.0), dy = (y - h / 2.0) / (h / 2.0);
                if (dx * dx + dy * dy > 0.8) img(x, y) = 0;
            }
    }
    return img;
}

}  // namespace

TEST_CASE("instantaneous features match the naive oracle") {
    std::mt19937 rng(2024);
    for (int t = 0; t < 200; ++t) {
        const auto img = grid(rng);
        const auto fv = ft::instantaneous_features(img);
        const auto want = oracle::instantaneous(to_oracle(img));
        CAPTURE(t);
        for (std::size_t i = 0; i < fv.size(); ++i) {
            CAPTURE(fv.names[i]);
            CHECK(close(fv.values[i], want.at(fv.names[i])));
        }
    }
}

TEST_CASE("motion features match the naive oracle") {
    std::mt19937 rng(99);
    for (int t = 0; t < 200; ++t) {
        const auto a = grid(rng);
        auto b = testutil::random_image(a.width(), a.height(), rng);
        if (t % 5 == 0) b = a;  // zero difference: x16 undefined
        const auto fv = ft::motion_features(a, b);
        const auto want = oracle::motion(to_oracle(a), to_oracle(b));
        CAPTURE(t);
        for (std::size_t i = 0; i < fv.size(); ++i) {
            CAPTURE(fv.names[i]);
            CHECK(close(fv.values[i], want.at(fv.names[i])));
        }
    }
}

TEST_CASE("motion features are identical under every kernel set") {
    std::mt19937 rng(7);
    const auto a = testutil::random_image(250, 250, rng), b = testutil::random_image(250, 250, rng);
    const auto before = kernels::active().isa;
    kernels::set_active(kernels::Isa::scalar);
    const auto ref = ft::motion_features(a, b);
    for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
        if (!kernels::set_active(isa)) continue;
        const auto got = ft::motion_features(a, b);
        CHECK(got.values == ref.values);
    }
    kernels::set_active(before);
}

TEST_CASE("hand-computed features on a 4x2 image") {
    GrayImage img(4, 2);
    const int px[2][4] = {{0, 10, 20, 0}, {0, 30, 40, 0}};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) img(x, y) = static_cast<std::uint8_t>(px[y][x]);
    const auto fv = ft::instantaneous_features(img);
    CHECK(*fv.get("x1") == doctest::Approx(100.0 / 8));
    CHECK(*fv.get("x2") == doctest::Approx(25.0));
    // row round(2/2) = 1, columns round(1.2)=1 .. round(2.8)=3
    CHECK(*fv.get("x3") == doctest::Approx(10.0));
    CHECK(*fv.get("x4") == doctest::Approx(20.0));
    CHECK(*fv.get("x8") == 8);

    const auto empty = ft::instantaneous_features(GrayImage(3, 3, 0));
    CHECK_FALSE(empty.get("x2"));
    CHECK(*empty.get("x7") == 0.0);
}

TEST_CASE("trimmed dynamic threshold") {
    GrayImage d(10, 1);
    for (int i = 0; i < 10; ++i) d(i, 0) = static_cast<std::uint8_t>(i);
    // c = 0.4: ranks 4 and 6 -> values 3..5
    CHECK(ft::dynamic_threshold(d, 0.4) == doctest::Approx(4.0 + 3.0));
    CHECK(ft::dynamic_threshold(GrayImage(4, 4, 9), 0.4) == doctest::Approx(9.0));
}

TEST_CASE("aggregation skips gaps") {
    const std::vector<double> s{3, kGap, 1, 2, 10};
    CHECK(ft::aggregate_series(s, ft::Aggregate::max) == 10);
    CHECK(ft::aggregate_series(s, ft::Aggregate::mean) == doctest::Approx(4.0));
    CHECK(ft::aggregate_series(s, ft::Aggregate::median) == doctest::Approx(2.5));
    const std::vector<double> g{kGap, kGap};
    CHECK_THROWS_AS(ft::aggregate_series(g, ft::Aggregate::mean), NoDataError);

    std::vector<GrayImage> frames(4, GrayImage(5, 5, 10));
    frames[2](1, 1) = 50;
    const auto agg = ft::aggregate_motion(frames);
    CHECK(agg.size() == 27);
    CHECK(*agg.get("MAX_x14") == 40);
    CHECK(*agg.get("MEDIAN_x17") == 40);
    CHECK(*agg.get("MEAN_x17") == doctest::Approx(80.0 / 3));
}

TEST_CASE("property: motion features are symmetric in frame order") {
    std::mt19937 rng(5);
    for (int t = 0; t < 30; ++t) {
        const auto a = grid(rng);
        const auto b = testutil::random_image(a.width(), a.height(), rng);
        const auto f1 = ft::motion_features(a, b), f2 = ft::motion_features(b, a);
        for (std::size_t i = 0; i < f1.size(); ++i)
            CHECK(close(f1.values[i], f2.values[i]));
    }
}
