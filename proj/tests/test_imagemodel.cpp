#include <doctest.h>

#include <fstream>

#include "platescreen/layout.hpp"
#include "platescreen/png_io.hpp"
#include "test_util.hpp"

using namespace platescreen;

TEST_CASE("grid indexing is column, row") {
    GrayImage g(3, 2, 7);
    g(2, 1) = 9;
    CHECK(g.row(1)[2] == 9);
    CHECK(g.clamped(10, 10) == 9);
    CHECK(g.clamped(-5, 0) == 7);
    CHECK_FALSE(g.contains(3, 0));
    CHECK_THROWS_AS(GrayImage(-1, 2), DimensionError);
    const auto c = crop_clamped(g, 1, 0, 4, 3);
    CHECK(c(1, 1) == 9);
    CHECK(c(3, 2) == 9);
}

TEST_CASE("png round trip for gray, rgb and 16-bit input") {
    std::mt19937 rng(3);
    const auto g = testutil::random_image(17, 9, rng);
    auto planes = png::decode(png::encode(g));
    REQUIRE(planes.size() == 1);
    CHECK(planes[0] == g);

    RgbImage rgb(5, 4);
    for (std::size_t i = 0; i < rgb.size(); ++i)
        rgb.pixels()[i] = {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(2 * i),
                           static_cast<std::uint8_t>(255 - i)};
    planes = png::decode(png::encode(rgb));
    REQUIRE(planes.size() == 3);
    CHECK(planes[1](4, 3) == 38);
    CHECK(planes[2](0, 0) == 255);

    Grid<std::uint16_t> w16(2, 1);
    w16(0, 0) = 0x1234;
    w16(1, 0) = 0xff01;
    planes = png::decode(png::encode16(w16));
    CHECK(planes[0](0, 0) == 0x12);
    CHECK(planes[0](1, 0) == 0xff);

    const std::uint8_t junk[] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK_THROWS_AS(png::decode(junk), IoError);
}

TEST_CASE("layout template formats and parses") {
    LayoutTemplate t("{well}_t{frame:04}_z{plane}.png");
    CHECK(t.has(LayoutTemplate::frame));
    CHECK_FALSE(t.has(LayoutTemplate::channel));
    CHECK(t.format({"B03", 12, 1, 0}) == "B03_t0012_z1.png");
    const auto m = t.match("P1-B03_t0012_z1.png");
    REQUIRE(m);
    CHECK(m->well == "P1-B03");
    CHECK(m->frame == 12);
    CHECK(m->plane == 1);
    CHECK_FALSE(t.match("B03_t0012_z1.tif"));
    CHECK_THROWS_AS(LayoutTemplate("{well}_{frame"), SchemaError);
    CHECK_THROWS_AS(LayoutTemplate("{well}_{time}"), SchemaError);
    CHECK_THROWS_AS(LayoutTemplate("{frame}{frame}"), SchemaError);
    CHECK_THROWS_AS(LayoutTemplate("{frame:x}"), SchemaError);
}

TEST_CASE("stream save/load round trip and gap detection") {
    testutil::TempDir dir("layout");
    std::mt19937 rng(5);
    std::vector<GrayImage> imgs;
    for (int i = 0; i < 3 * 2; ++i) imgs.push_back(testutil::random_image(8, 6, rng));
    const ImageStream s(imgs, 3, 2, 1, 30.0);
    const LayoutTemplate t(kDefaultLayout);
    save_stream(dir.path, "A01", t, s);
    save_stream(dir.path, "A02", t, s);
    const auto back = load_stream(dir.path, "A01", t, 30.0);
    CHECK(back == s);
    CHECK(back.n_planes() == 2);
    CHECK(list_wells(dir.path, t) == std::vector<std::string>{"A01", "A02"});

    std::filesystem::remove(dir.path / t.format({"A01", 1, 0, 0}));
    try {
        load_stream(dir.path, "A01", t);
        FAIL("expected a gap");
    } catch (const GapError& e) {
        CHECK(e.missing_index() == 1);
    }
    std::filesystem::remove(dir.path / t.format({"A01", 1, 1, 0}));
    try {
        load_stream(dir.path, "A01", t);
        FAIL("expected a gap");
    } catch (const GapError& e) {
        CHECK(e.missing_index() == 1);
    }
    CHECK_THROWS_AS(load_stream(dir.path, "Z99", t), IoError);
}

TEST_CASE("rgb files without a channel field load as three channels") {
    testutil::TempDir dir("rgb");
    RgbImage rgb(4, 4, Rgb{10, 20, 30});
    png::write(dir.path / "W1_f0000.png", rgb);
    png::write(dir.path / "W1_f0001.png", rgb);
    const auto s = load_stream(dir.path, "W1", LayoutTemplate("{well}_f{frame:04}.png"));
    CHECK(s.n_channels() == 3);
    CHECK(s.n_frames() == 2);
    CHECK(s.at(1, 0, 2)(3, 3) == 30);
}

TEST_CASE("stream rejects inconsistent shapes") {
    std::vector<GrayImage> imgs{GrayImage(4, 4), GrayImage(5, 4)};
    CHECK_THROWS_AS(ImageStream(imgs, 2, 1, 1), DimensionError);
    CHECK_THROWS_AS(ImageStream({GrayImage(4, 4)}, 2, 1, 1), DimensionError);
    const auto s = ImageStream::from_frames({GrayImage(2, 2)});
    CHECK_THROWS_AS(s.at(1), DimensionError);
    CHECK(s.source_frames() == std::vector<int>{0});
}
