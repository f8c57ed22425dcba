#include <doctest.h>

#include <algorithm>

#include "freqbound/testpoints.hpp"
#include "oracles.hpp"

using namespace freqbound;

TEST_SUITE("testpoints") {

TEST_CASE("close points") {
    const auto c = close_points();
    CHECK(c[0] == doctest::Approx(0.001 * oracle::pi).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(0.01 * oracle::pi).epsilon(1e-15));
    for (double h : c) {
        CHECK(h > 0.0);
        CHECK(h < 0.1 * oracle::pi);
    }
}

TEST_CASE("K = 20 has exactly nine positive side lobes") {
    CHECK(sidelobe_points(20).size() == 9u);
}

TEST_CASE("side lobes are positive local maxima between consecutive nulls") {
    for (int k : {2, 3, 5, 8, 20, 21, 40, 60}) {
        CAPTURE(k);
        const auto lobes = sidelobe_points(k);
        CHECK(std::is_sorted(lobes.begin(), lobes.end()));
        for (double h : lobes) {
            const double d = oracle::kernel_sum(h, k);
            CHECK(d > 0.0);
            CHECK(h > 2 * oracle::pi / k);
            CHECK(h <= oracle::pi);
            if (h < oracle::pi - 1e-6) {
                CHECK(oracle::kernel_sum(h - 1e-4, k) <= d);
                CHECK(oracle::kernel_sum(h + 1e-4, k) <= d);
                // Nulls of the closed form sit at 2 pi m / K.
                const double m = std::floor(h * k / (2 * oracle::pi));
                CHECK(h > 2 * oracle::pi * m / k);
                CHECK(h < 2 * oracle::pi * (m + 1) / k);
            }
        }
    }
}

TEST_CASE("side lobe locations stable under grid refinement") {
    for (int k : {7, 20, 33}) {
        const auto coarse = sidelobe_points(k, 64);
        const auto fine = sidelobe_points(k, 256);
        REQUIRE(coarse.size() == fine.size());
        for (std::size_t i = 0; i < coarse.size(); ++i) CHECK(std::abs(coarse[i] - fine[i]) < 1e-6);
    }
}

TEST_CASE("side lobe errors") {
    CHECK_THROWS_AS(sidelobe_points(1), std::invalid_argument);
    CHECK_THROWS_AS(sidelobe_points(20, 32), std::invalid_argument);
}

TEST_CASE("even points") {
    const auto e = even_points(10);
    REQUIRE(e.size() == 10u);
    CHECK(e.front() == doctest::Approx(0.1 * oracle::pi).epsilon(1e-15));
    CHECK(e.back() == doctest::Approx(oracle::pi).epsilon(1e-15));
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] - e[i - 1] == doctest::Approx(0.1 * oracle::pi).epsilon(1e-12));
    const auto one = even_points(1);
    REQUIRE(one.size() == 1u);
    CHECK(one[0] == doctest::Approx(0.1 * oracle::pi).epsilon(1e-15));
    for (int n : {2, 5, 17})
        for (double h : even_points(n)) {
            CHECK(h >= 0.1 * oracle::pi - 1e-15);
            CHECK(h <= oracle::pi + 1e-15);
        }
    CHECK_THROWS_AS(even_points(0), std::invalid_argument);
}

TEST_CASE("build: legacy, proposed and single-point sets") {
    const auto legacy = build({2, 9, 0, 0.5}, 20);
    CHECK(legacy.size() == 11u);
    CHECK(legacy.trio == "2/9/0");
    CHECK(std::count(legacy.provenance.begin(), legacy.provenance.end(), PointKind::Sidelobe) == 9);

    const auto proposed = build({2, 9, 10, 0.5}, 20);
    CHECK(proposed.size() <= 21u);
    CHECK(proposed.size() >= 20u);
    CHECK(proposed.trio == "2/9/10");

    const auto single = build({1, 0, 0, 0.5}, 20);
    REQUIRE(single.size() == 1u);
    CHECK(single.h[0] == doctest::Approx(0.001 * oracle::pi).epsilon(1e-15));
    CHECK(single.provenance[0] == PointKind::Close);
}

TEST_CASE("build output strictly increasing in (0, pi]") {
    for (int k : {4, 20, 60})
        for (auto cfg : {TestPointConfig{2, 1, 10}, TestPointConfig{0, 0, 30}, TestPointConfig{2, 1, 1}}) {
            const auto set = build(cfg, k);
            REQUIRE(set.provenance.size() == set.h.size());
            for (std::size_t i = 0; i < set.size(); ++i) {
                CHECK(set.h[i] > 0.0);
                CHECK(set.h[i] <= oracle::pi);
                if (i > 0) CHECK(set.h[i] - set.h[i - 1] >= 1e-6);
            }
        }
}

TEST_CASE("duplicates within 1e-6 rad are dropped") {
    // K = 3: D(h) = 1 + cos h + cos 2h has its only side lobe at pi, which
    // coincides with the last even point.
    CHECK(sidelobe_points(2).empty());
    const auto lobes = sidelobe_points(3);
    REQUIRE(lobes.size() == 1u);
    CHECK(lobes[0] == doctest::Approx(oracle::pi).epsilon(1e-12));
    const auto set = build({0, 1, 10, 0.5}, 3);
    CHECK(set.size() == 10u);
}

TEST_CASE("nested sets for the progressive side-lobe experiment") {
    std::vector<double> prev;
    for (int n : {1, 3, 5, 7, 9}) {
        const auto set = build({2, n, 0, 0.5}, 20);
        CHECK(set.size() == static_cast<std::size_t>(2 + n));
        for (double h : prev) CHECK(std::find(set.h.begin(), set.h.end(), h) != set.h.end());
        prev = set.h;
    }
}

TEST_CASE("config validation and parsing") {
    CHECK_THROWS_AS(build({2, 10, 0, 0.5}, 20), std::invalid_argument);
    CHECK_THROWS_AS(build({0, 0, 0, 0.5}, 20), std::invalid_argument);
    CHECK_THROWS_AS(build({3, 0, 0, 0.5}, 20), std::invalid_argument);
    CHECK_THROWS_AS(build({1, 0, 0, 1.0}, 20), std::invalid_argument);
    const auto a = TestPointConfig::parse("2,9,10");
    const auto b = TestPointConfig::parse("2/9/10", 0.3);
    CHECK(a.trio() == "2/9/10");
    CHECK(b.s_exponent == 0.3);
    CHECK(b.e_count == 10);
    CHECK_THROWS_AS(TestPointConfig::parse("2,9"), std::invalid_argument);
    CHECK_THROWS_AS(TestPointConfig::parse("a,b,c"), std::invalid_argument);
}

}
