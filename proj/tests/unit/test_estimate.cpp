#include "doctest.h"

#include "vgiq/estimate.hpp"

#include <random>

using namespace vgiq::estimate;

TEST_CASE("efficiency extrapolation")
{
    const auto full = from_efficiency(100, 1.0, 1.0);
    CHECK(full.low == 100.0);
    CHECK(full.high == 100.0);

    const auto r = from_efficiency(100, 0.5, 0.25);
    CHECK(r.low == 200.0);
    CHECK(r.high == 400.0);
    CHECK(r.method == Method::efficiency);

    CHECK_THROWS_AS(from_efficiency(100, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(from_efficiency(100, 0.25, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(from_efficiency(100, 1.5, 0.5), std::invalid_argument);
}

TEST_CASE("density extrapolation")
{
    const auto a = from_density(1, 1, 100);
    CHECK(a.low == 100.0);
    CHECK(a.high == 100.0);
    const auto ob = from_density(0.8, 1.8, 17530);
    CHECK(ob.low == doctest::Approx(14024.0));
    CHECK(ob.high == doctest::Approx(31554.0));
    CHECK(from_density(0.0, 1.0, 10).low == 0.0);
    CHECK_THROWS_AS(from_density(2, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(from_density(1, 2, 0), std::invalid_argument);
}

TEST_CASE("efficiency identities on random inputs")
{
    std::mt19937_64 rng(60000);
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double e1 = u(rng);
        double e2 = u(rng);
        if (e1 > e2) std::swap(e1, e2);
        const double mapped = static_cast<double>(rng() % 100000);
        const auto r = from_efficiency(mapped, e2, e1);
        CHECK(r.low <= r.high);
        if (mapped > 0) {
            CHECK(mapped / r.high >= e1 * (1 - 1e-12));
            CHECK(mapped / r.low <= e2 * (1 + 1e-12));
            CHECK(mapped / r.low >= e1 * (1 - 1e-12));
        }
        const auto point = from_efficiency(mapped, e1, e1);
        CHECK(point.low == point.high);
        const auto doubled = from_efficiency(2 * mapped, e2, e1);
        CHECK(doubled.low == doctest::Approx(2 * r.low));
        CHECK(doubled.high == doctest::Approx(2 * r.high));
    }
}

TEST_CASE("district aggregation sums bounds and skips unusable districts")
{
    const std::vector<DistrictInput> in{{"a", 100, 0.5, 0.25}, {"b", 50, 1.0, 0.5}, {"c", 10, 0.0, 0.0}};
    const auto agg = aggregate_by_district(in);
    REQUIRE(agg.districts.size() == 2);
    CHECK(agg.total.low == 250.0);
    CHECK(agg.total.high == 500.0);
    REQUIRE(agg.skipped.size() == 1);
    CHECK(agg.skipped[0] == "c");
}

TEST_CASE("significant-figure rounding")
{
    CHECK(round_significant(14024.0) == 14000.0);
    CHECK(round_significant(31554.0) == 32000.0);
    CHECK(round_significant(0.0123) == doctest::Approx(0.012));
    CHECK(round_significant(0.0) == 0.0);
}
