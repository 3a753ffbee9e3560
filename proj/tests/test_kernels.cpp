#include <doctest.h>

#include <random>
#include <vector>

#include "platescreen/kernels.hpp"

using namespace platescreen::kernels;

namespace {

std::vector<std::uint8_t> bytes(std::size_t n, std::mt19937& rng) {
    std::uniform_int_distribution<int> d(0, 255);
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(d(rng));
    return v;
}

std::vector<const KernelTable*> variants() {
    std::vector<const KernelTable*> v;
    if (auto* t = avx2_table()) v.push_back(t);
    if (auto* t = neon_table()) v.push_back(t);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels on hand-checked input") {
    const auto& s = scalar_table();
    const std::uint8_t a[] = {0, 10, 255, 7};
    const std::uint8_t b[] = {5, 3, 0, 7};
    std::uint8_t out[4];
    s.absdiff(a, b, out, 4);
    CHECK(out[0] == 5);
    CHECK(out[2] == 255);
    CHECK(s.sad(a, b, 4) == 5 + 7 + 255);
    const auto dm = s.diff_moments(a, b, 4);
    CHECK(dm.sum == 267);
    CHECK(dm.sum_sq == 25 + 49 + 255 * 255);
    CHECK(dm.max == 255);
    const auto m = s.moments(a, 4);
    CHECK(m.sum == 272);
    CHECK(m.sum_sq == 100 + 255 * 255 + 49);

    const std::int16_t noise[] = {-10, 300, 1, -300};
    s.add_noise(a, noise, out, 4);
    CHECK(out[0] == 0);
    CHECK(out[1] == 255);
    CHECK(out[2] == 255);
    CHECK(out[3] == 0);

    const std::uint8_t c[] = {1, 0, 255, 8};
    s.mean3(a, b, c, out, 4);
    CHECK(out[0] == 2);    // 6/3
    CHECK(out[1] == 4);    // 13/3 = 4.33
    CHECK(out[2] == 170);  // 510/3
    CHECK(out[3] == 7);    // 22/3 = 7.33
}

TEST_CASE("mean3 rounds halves up over the full input range") {
    const auto& s = scalar_table();
    for (int sum = 0; sum <= 765; ++sum) {
        const std::uint8_t a = static_cast<std::uint8_t>(std::min(sum, 255));
        const std::uint8_t b = static_cast<std::uint8_t>(std::min(sum - a, 255));
        const std::uint8_t c = static_cast<std::uint8_t>(sum - a - b);
        std::uint8_t o;
        s.mean3(&a, &b, &c, &o, 1);
        CHECK(o == static_cast<int>(std::floor(sum / 3.0 + 0.5)));
    }
}

TEST_CASE("SIMD variants match the scalar reference") {
    const auto vs = variants();
    if (vs.empty()) {
        MESSAGE("no SIMD variant available on this CPU");
        return;
    }
    const auto& s = scalar_table();
    std::mt19937 rng(42);
    // odd lengths exercise the scalar tails; the large one crosses the
    // 32-bit accumulator flush in the moment kernels
    const std::size_t lengths[] = {0, 1, 15, 16, 17, 31, 32, 33, 63, 64, 65, 250 * 250, 140001};
    for (const KernelTable* t : vs) {
        CAPTURE(isa_name(t->isa));
        for (std::size_t n : lengths) {
            CAPTURE(n);
            const auto a = bytes(n, rng), b = bytes(n, rng), c = bytes(n, rng);
            std::vector<std::int16_t> noise(n);
            std::uniform_int_distribution<int> nd(-400, 400);
            for (auto& v : noise) v = static_cast<std::int16_t>(nd(rng));

            std::vector<std::uint8_t> o1(n), o2(n);
            s.absdiff(a.data(), b.data(), o1.data(), n);
            t->absdiff(a.data(), b.data(), o2.data(), n);
            CHECK(o1 == o2);
            CHECK(s.sad(a.data(), b.data(), n) == t->sad(a.data(), b.data(), n));
            CHECK(s.diff_moments(a.data(), b.data(), n) == t->diff_moments(a.data(), b.data(), n));
            CHECK(s.moments(a.data(), n) == t->moments(a.data(), n));
            s.add_noise(a.data(), noise.data(), o1.data(), n);
            t->add_noise(a.data(), noise.data(), o2.data(), n);
            CHECK(o1 == o2);
            s.mean3(a.data(), b.data(), c.data(), o1.data(), n);
            t->mean3(a.data(), b.data(), c.data(), o2.data(), n);
            CHECK(o1 == o2);
        }
    }
}

TEST_CASE("saturated input keeps 64-bit sums exact") {
    const std::size_t n = 1 << 20;
    std::vector<std::uint8_t> hi(n, 255), lo(n, 0);
    const auto expect_sq = static_cast<std::uint64_t>(n) * 255 * 255;
    CHECK(scalar_table().diff_moments(hi.data(), lo.data(), n).sum_sq == expect_sq);
    for (const KernelTable* t : variants()) {
        CHECK(t->diff_moments(hi.data(), lo.data(), n).sum_sq == expect_sq);
        CHECK(t->moments(hi.data(), n).sum_sq == expect_sq);
    }
}

TEST_CASE("runtime dispatch can be pinned to the reference path") {
    const Isa before = active().isa;
    REQUIRE(set_active(Isa::scalar));
    CHECK(active().isa == Isa::scalar);
    CHECK(isa_name(Isa::scalar) == "scalar");
    set_active(before);
    CHECK(active().isa == before);
}
