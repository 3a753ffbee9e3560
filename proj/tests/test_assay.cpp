#include <doctest.h>

#include <cmath>
#include <random>

#include "platescreen/assay.hpp"
#include "platescreen/error.hpp"

using namespace platescreen;
namespace as = platescreen::assay;

namespace {

double hill(double z, double lo, double hi, double ec, double d) {
    return lo + (hi - lo) / (1.0 + std::pow(z / ec, -d));
}

}  // namespace

TEST_CASE("Z' of two groups with exact moments") {
    // N(100,5) and N(10,5) represented by samples with exactly those moments
    const std::vector<double> a{95, 100, 105}, b{5, 10, 15};
    const auto m = as::validation_metrics({a, b});
    REQUIRE(m.zprime);
    CHECK(*m.zprime == doctest::Approx(2.0 / 3.0));
    CHECK(m.group_mu_max == 0);
    CHECK(m.group_mu_min == 1);
}

TEST_CASE("undefined metrics are reported as missing") {
    const auto m = as::validation_metrics({{1, 3}, {3, 1}});
    CHECK_FALSE(m.zprime);
    REQUIRE(m.cv[0]);
    CHECK(*m.cv[0] == doctest::Approx(std::sqrt(2.0) / 2 * 100));
    const auto z = as::validation_metrics({{-1, 1}, {4, 6}});
    CHECK_FALSE(z.cv[0]);
    CHECK_FALSE(z.shv);
    const auto flat = as::validation_metrics({{2, 2}, {5, 5}});
    CHECK_FALSE(flat.snr);
    CHECK_FALSE(flat.sf);
    CHECK(*flat.zprime == 1.0);
    CHECK_THROWS_AS(as::validation_metrics({{1}, {2, 3}}), InvalidArgumentError);
    CHECK_THROWS_AS(as::validation_metrics({}), InvalidArgumentError);
}

TEST_CASE("MSR") {
    CHECK(as::msr(0.25) == std::pow(10.0, 0.5));
    CHECK(as::msr(0.0) == 1.0);
}

TEST_CASE("property: Z' is invariant to positive scaling and translation") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10, 10), k(0.01, 100);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> a(5), b(5);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng) + 25;
        const double s = k(rng), c = u(rng) * 10;
        auto f = [&](std::vector<double> g) {
            for (auto& v : g) v = s * v + c;
            return g;
        };
        const auto z0 = *as::validation_metrics({a, b}).zprime;
        const auto z1 = *as::validation_metrics({f(a), f(b)}).zprime;
        CHECK(z1 == doctest::Approx(z0).epsilon(1e-9));
    }
}

TEST_CASE("acquisition time") {
    CHECK(as::estimate_acquisition_time(96, 3, 1, 0.2, 1.2, 4) == doctest::Approx(171.6));
    CHECK(as::estimate_acquisition_time(96, 5, 30, 0.2, 1.2, 4) / 60 ==
          doctest::Approx(106.93).epsilon(1e-3));
    CHECK(as::estimate_acquisition_time(1, 7, 1, 0.5, 9, 9) == doctest::Approx(3.5));
    CHECK_THROWS_AS(as::estimate_acquisition_time(0, 1, 1, 1, 1, 1), InvalidArgumentError);
    CHECK_THROWS_AS(as::estimate_acquisition_time(1, 1, 1, -1, 1, 1), InvalidArgumentError);
}

TEST_CASE("noiseless sigmoid is recovered") {
    std::vector<double> z, y;
    for (int i = 0; i < 8; ++i) {
        z.push_back(0.4 * std::pow(1.4, i));
        y.push_back(hill(z.back(), 0, 1, 1.1, 4));
    }
    const auto f = as::fit_dose_response(z, y);
    CHECK(f.converged);
    CHECK(f.ec == doctest::Approx(1.1).epsilon(1e-3));
    CHECK(f.d == doctest::Approx(4).epsilon(1e-3));
    CHECK(f.evaluate(1.1) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("falling curves report a negative slope") {
    std::vector<double> z, y;
    for (int i = 0; i < 8; ++i) {
        z.push_back(0.4 * std::pow(1.4, i));
        y.push_back(hill(z.back(), 0.1, 0.9, 1.5, -3));
    }
    const auto f = as::fit_dose_response(z, y);
    CHECK(f.p_min < f.p_max);
    CHECK(f.d == doctest::Approx(-3).epsilon(1e-3));
    CHECK(f.ec == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("percent input is normalized") {
    std::vector<double> z, y;
    for (int i = 0; i < 6; ++i) {
        z.push_back(0.5 * std::pow(1.5, i));
        y.push_back(100 * hill(z.back(), 0, 1, 1.2, 3));
    }
    const auto f = as::fit_dose_response(z, y);
    CHECK(f.p_max == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flat data and invalid input") {
    const std::vector<double> z{0.5, 1, 2, 4};
    const auto f = as::fit_dose_response(z, {0.5, 0.5, 0.5, 0.5});
    CHECK_FALSE(f.converged);
    CHECK_THROWS_AS(as::fit_dose_response({0, 1, 2, 3}, {0, 0.1, 0.5, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(as::fit_dose_response({1, 1, 2, 3}, {0, 0.1, 0.5, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(as::fit_dose_response({1, 2, 3}, {0, 0.5}), Error);
}

TEST_CASE("property: SSE never increases across accepted steps") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 0.05);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> z, y;
        for (int i = 0; i < 8; ++i) {
            z.push_back(0.3 * std::pow(1.5, i));
            y.push_back(hill(z.back(), 0, 1, 1.0, 2.5) + n(rng));
        }
        const auto f = as::fit_dose_response(z, y);
        for (std::size_t i = 1; i < f.sse_trace.size(); ++i)
            CHECK(f.sse_trace[i] <= f.sse_trace[i - 1]);
    }
}

TEST_CASE("property: rescaling concentration units rescales EC exactly") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 0.03);
    for (double lambda : {1000.0, 0.001, 3.7}) {
        std::vector<double> z, zs, y;
        for (int i = 0; i < 8; ++i) {
            z.push_back(0.3 * std::pow(1.5, i));
            zs.push_back(lambda * z.back());
            y.push_back(hill(z.back(), 0, 1, 1.0, 2.5) + n(rng));
        }
        const auto a = as::fit_dose_response(z, y), b = as::fit_dose_response(zs, y);
        CHECK(b.ec == doctest::Approx(lambda * a.ec).epsilon(1e-6));
        CHECK(b.d == doctest::Approx(a.d).epsilon(1e-6));
    }
}

TEST_CASE("covariance is symmetric and positive on the diagonal") {
    std::vector<double> z, y;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0, 0.02);
    for (int i = 0; i < 10; ++i) {
        z.push_back(0.3 * std::pow(1.4, i));
        y.push_back(hill(z.back(), 0, 1, 1.0, 3) + n(rng));
    }
    const auto f = as::fit_dose_response(z, y);
    REQUIRE(f.covariance);
    CHECK((*f.covariance - f.covariance->transpose()).norm() < 1e-9 * f.covariance->norm());
    for (int i = 0; i < 4; ++i) CHECK((*f.covariance)(i, i) > 0);
    const auto j = f.to_json();
    CHECK(j.contains("ec"));
}
