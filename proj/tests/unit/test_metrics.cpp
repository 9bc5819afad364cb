#include "doctest.h"

#include "vgiq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace vgiq;
using namespace vgiq::metrics;

namespace {

OsmElement node(std::int64_t id, Tags tags, std::int64_t version = 1, std::int64_t uid = 1)
{
    OsmElement e;
    e.id = id;
    e.lat = 48.0;
    e.lon = 11.0;
    e.tags = std::move(tags);
    e.version = version;
    e.uid = uid;
    e.timestamp = parse_iso8601("2020-01-01T00:00:00Z");
    return e;
}

const Tags hwc{{"historic", "wayside_cross"}};

// Pairwise mean-absolute-difference definition.
double gini_pairwise(const std::vector<std::int64_t>& x)
{
    double num = 0.0;
    double sum = 0.0;
    for (auto a : x) {
        sum += static_cast<double>(a);
        for (auto b : x) {
            num += std::abs(static_cast<double>(a - b));
        }
    }
    return num / (2.0 * static_cast<double>(x.size()) * sum);
}

std::size_t index_of(const CooccurrenceMatrix& m, CrossCategory c)
{
    return static_cast<std::size_t>(
        std::find(m.categories.begin(), m.categories.end(), c) - m.categories.begin());
}

} // namespace

TEST_CASE("co-occurrence asymmetry fixture")
{
    std::vector<OsmElement> els{node(1, hwc), node(2, hwc), node(3, hwc),
                                node(4, {{"historic", "wayside_cross"}, {"man_made", "cross"}})};
    const auto m = cooccurrence_matrix(els, all_categories);
    const auto h = index_of(m, CrossCategory::HWC);
    const auto mm = index_of(m, CrossCategory::MMC);
    CHECK(*m.share[h][mm] == 0.25);
    CHECK(*m.share[mm][h] == 1.0);
    CHECK_FALSE(m.share[h][h].has_value());
    const auto hws = index_of(m, CrossCategory::HWS);
    CHECK_FALSE(m.share[hws][h].has_value());  // zero denominator
    CHECK(*m.share[h][hws] == 0.0);
}

TEST_CASE("co-occurrence: 10 MTC of which 1 MC")
{
    std::vector<OsmElement> els;
    for (int i = 0; i < 10; ++i) {
        Tags t{{"memorial:type", "cross"}};
        if (i == 0) {
            t["memorial"] = "cross";
        }
        els.push_back(node(i, t));
    }
    const std::vector<CrossCategory> cats{CrossCategory::MTC, CrossCategory::MC};
    const auto m = cooccurrence_matrix(els, cats);
    CHECK(*m.share[0][1] == doctest::Approx(0.10));
    CHECK(*m.share[1][0] == 1.0);
}

TEST_CASE("co-occurrence without dual tags is zero off-diagonal")
{
    std::vector<OsmElement> els{node(1, hwc), node(2, {{"man_made", "cross"}}),
                                node(3, {{"summit:cross", "yes"}})};
    const std::vector<CrossCategory> cats{CrossCategory::HWC, CrossCategory::MMC, CrossCategory::SMY};
    const auto m = cooccurrence_matrix(els, cats);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            if (a != b) {
                CHECK(*m.share[a][b] == 0.0);
            }
        }
    }
    CHECK_THROWS_AS(cooccurrence_matrix(els, std::span<const CrossCategory>{}), std::invalid_argument);
}

TEST_CASE("co-occurrence joint-count reciprocity on random fixtures")
{
    std::mt19937_64 rng(8);
    for (int round = 0; round < 100; ++round) {
        std::vector<OsmElement> els;
        const int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            Tags t;
            for (auto c : all_categories) {
                if (rng() % 3 == 0) {
                    const auto d = defining_tag(c);
                    t[std::string(d.key)] = std::string(d.value);
                }
            }
            els.push_back(node(i, t));
        }
        const auto m = cooccurrence_matrix(els, all_categories);
        for (std::size_t a = 0; a < 6; ++a) {
            for (std::size_t b = 0; b < 6; ++b) {
                if (a == b || !m.share[a][b] || !m.share[b][a]) {
                    continue;
                }
                const double ab = *m.share[a][b] * static_cast<double>(m.counts[a]);
                const double ba = *m.share[b][a] * static_cast<double>(m.counts[b]);
                CHECK(*m.share[a][b] >= 0.0);
                CHECK(*m.share[a][b] <= 1.0);
                CHECK(std::abs(ab - ba) < 1e-9);
                CHECK(std::abs(ab - static_cast<double>(m.joint[a][b])) < 1e-9);
            }
        }
    }
}

TEST_CASE("quantiles and whiskers")
{
    const auto one = summarize_ages("g", {100.0});
    CHECK(one.median_days == 100.0);
    CHECK(one.q1_days == 100.0);
    CHECK(one.q3_days == 100.0);
    CHECK(one.whisker_lo_days == 100.0);
    CHECK(one.whisker_hi_days == 100.0);

    const auto five = summarize_ages("g", {50, 10, 40, 20, 30});
    CHECK(five.q1_days == 20.0);
    CHECK(five.median_days == 30.0);
    CHECK(five.q3_days == 40.0);
    CHECK(five.whisker_lo_days == 10.0);
    CHECK(five.whisker_hi_days == 50.0);

    const auto outlier = summarize_ages("g", {10, 20, 30, 40, 1000});
    CHECK(outlier.whisker_hi_days == 40.0);
    CHECK(outlier.whisker_lo_days == 10.0);

    const std::vector<double> four{1, 2, 3, 4};
    CHECK(quantile(four, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(four, 0.5) == doctest::Approx(2.5));
    CHECK_THROWS_AS(summarize_ages("g", {}), std::invalid_argument);
}

TEST_CASE("age histogram uses 90-day bins from zero")
{
    const auto s = summarize_ages("g", {0.0, 89.9, 90.0, 300.0});
    REQUIRE(s.histogram.size() == 4);
    CHECK(s.histogram[0] == std::pair<double, std::size_t>{0.0, 2});
    CHECK(s.histogram[1] == std::pair<double, std::size_t>{90.0, 1});
    CHECK(s.histogram[2] == std::pair<double, std::size_t>{180.0, 0});
    CHECK(s.histogram[3] == std::pair<double, std::size_t>{270.0, 1});
}

TEST_CASE("age stats invariants and q3 monotonicity on random data")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5000.0);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> ages(1 + rng() % 40);
        for (auto& a : ages) {
            a = u(rng);
        }
        const auto s = summarize_ages("g", ages);
        CHECK(s.q1_days <= s.median_days);
        CHECK(s.median_days <= s.q3_days);
        const auto [mn, mx] = std::minmax_element(ages.begin(), ages.end());
        const double iqr = s.q3_days - s.q1_days;
        CHECK(s.whisker_lo_days >= *mn);
        CHECK(s.whisker_hi_days <= *mx);
        CHECK(s.whisker_lo_days >= s.q1_days - 1.5 * iqr);
        CHECK(s.whisker_hi_days <= s.q3_days + 1.5 * iqr);

        auto more = ages;
        more.push_back(s.q3_days + 1.0 + u(rng));
        CHECK(summarize_ages("g", more).q3_days >= s.q3_days);
    }
}

TEST_CASE("age_stats rejects future timestamps")
{
    auto a = node(1, hwc);
    auto b = node(2, hwc);
    b.timestamp = parse_iso8601("2030-01-01T00:00:00Z");
    const std::vector<OsmElement> els{a, b};
    const auto ref = parse_iso8601("2020-04-10T00:00:00Z");
    const auto rep = age_stats(single_group(els, "all"), ref);
    REQUIRE(rep.groups.size() == 1);
    CHECK(rep.groups[0].n == 1);
    CHECK(rep.groups[0].median_days == 100.0);
    REQUIRE(rep.rejects.size() == 1);
    CHECK(rep.rejects[0].index == 2);
}

TEST_CASE("version histogram")
{
    std::vector<OsmElement> ones{node(1, hwc, 1), node(2, hwc, 1)};
    const auto h1 = version_histogram(ones);
    CHECK(h1 == VersionHistogram{1.0, 0.0, 0.0, 0.0});

    std::vector<OsmElement> mixed;
    for (auto v : {1, 1, 2, 3, 4, 7}) {
        mixed.push_back(node(v, hwc, v));
    }
    const auto h = version_histogram(mixed);
    CHECK(h[0] == doctest::Approx(1.0 / 3.0));
    CHECK(h[1] == doctest::Approx(1.0 / 6.0));
    CHECK(h[2] == doctest::Approx(1.0 / 6.0));
    CHECK(h[3] == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(h[0] + h[1] + h[2] + h[3] - 1.0) <= 1e-12);
}

TEST_CASE("version histogram sums to one on random input")
{
    std::mt19937_64 rng(4);
    for (int round = 0; round < 100; ++round) {
        std::vector<OsmElement> els;
        const auto n = 1 + rng() % 97;
        for (std::size_t i = 0; i < n; ++i) {
            els.push_back(node(static_cast<std::int64_t>(i), hwc, 1 + static_cast<std::int64_t>(rng() % 12)));
        }
        const auto h = version_histogram(els);
        CHECK(std::abs(h[0] + h[1] + h[2] + h[3] - 1.0) <= 1e-12);
    }
}

TEST_CASE("gini fixed values")
{
    const std::vector<std::int64_t> equal{5, 5, 5, 5};
    CHECK(gini(equal).gini == 0.0);
    const std::vector<std::int64_t> two{1, 3};
    const auto g = gini(two);
    CHECK(g.gini == 0.25);
    CHECK(g.n_contributors == 2);
    CHECK(g.top_contributor_share == 0.75);
    const std::vector<std::int64_t> zeros{0, 0};
    CHECK_THROWS_AS(gini(zeros), std::domain_error);
    const std::vector<std::int64_t> single{0, 0, 0, 9};
    CHECK(gini(single).gini == doctest::Approx(0.75));
}

TEST_CASE("gini matches pairwise oracle, bounds and scale invariance")
{
    std::mt19937_64 rng(1912);
    for (int round = 0; round < 1000; ++round) {
        const auto n = 1 + rng() % 50;
        std::vector<std::int64_t> x(n);
        for (auto& v : x) {
            // heavy-tailed, with some zero contributors
            v = (rng() % 5 == 0) ? 0 : static_cast<std::int64_t>(1 + rng() % (1 + rng() % 1000));
        }
        if (std::all_of(x.begin(), x.end(), [](auto v) { return v == 0; })) {
            x[0] = 1;
        }
        const double g = gini(x).gini;
        CHECK(std::abs(g - gini_pairwise(x)) < 1e-12);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 - 1.0 / static_cast<double>(n) + 1e-15);

        const std::int64_t c = 1 + static_cast<std::int64_t>(rng() % 1000);
        auto scaled = x;
        for (auto& v : scaled) {
            v *= c;
        }
        CHECK(std::abs(gini(scaled).gini - g) <= 1e-12);
    }
}

TEST_CASE("gini transfer principle")
{
    std::mt19937_64 rng(6);
    for (int round = 0; round < 300; ++round) {
        std::vector<std::int64_t> x(2 + rng() % 20);
        for (auto& v : x) {
            v = static_cast<std::int64_t>(rng() % 100);
        }
        auto mx = std::max_element(x.begin(), x.end());
        if (*mx < 2) {
            continue;
        }
        const double before = gini(x).gini;
        auto y = x;
        auto ymax = std::max_element(y.begin(), y.end());
        auto ymin = std::min_element(y.begin(), y.end());
        if (*ymax - *ymin < 2) {
            continue;
        }
        --*ymax;
        ++*ymin;
        CHECK(gini(y).gini <= before + 1e-15);
    }
}

TEST_CASE("contributions by uid")
{
    std::vector<OsmElement> els{node(1, hwc, 1, 7), node(2, hwc, 1, 7), node(3, hwc, 1, 3)};
    const auto c = contributions_by_uid(els);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == std::pair<std::int64_t, std::int64_t>{3, 1});
    CHECK(c[1] == std::pair<std::int64_t, std::int64_t>{7, 2});
}

TEST_CASE("tag richness")
{
    std::vector<OsmElement> one{node(1, {{"historic", "wayside_cross"}, {"a", "1"}, {"b", "2"}})};
    const auto r1 = tag_richness(single_group(one, "g"), CrossCategory::HWC);
    REQUIRE(r1.size() == 1);
    CHECK(*r1[0].mean_descriptive == 2.0);

    std::vector<OsmElement> four{
        node(1, hwc),
        node(2, {{"historic", "wayside_cross"}, {"material", "wood"}}),
        node(3, {{"historic", "wayside_cross"}, {"religion", "christian"}}),
        node(4, {{"historic", "wayside_cross"}, {"material", "stone"}, {"religion", "christian"}}),
        node(5, {{"man_made", "cross"}, {"name", "ignored"}}),
    };
    const auto r = tag_richness(single_group(four, "g"), CrossCategory::HWC);
    REQUIRE(r.size() == 1);
    CHECK(r[0].n == 4);
    CHECK(*r[0].mean_descriptive == 1.0);
    REQUIRE(r[0].key_frequencies.size() == 2);
    CHECK(r[0].key_frequencies[0].key == "material");
    CHECK(r[0].key_frequencies[0].share == 0.5);
    CHECK(r[0].key_frequencies[1].key == "religion");
    CHECK(r[0].key_frequencies[1].share == 0.5);

    const auto empty = tag_richness(Grouping{{"empty", {}}}, CrossCategory::HWC);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].n == 0);
    CHECK_FALSE(empty[0].mean_descriptive.has_value());
}

TEST_CASE("key coverage")
{
    std::vector<OsmElement> none{node(1, hwc), node(2, hwc)};
    const auto c0 = key_coverage(none, "material");
    CHECK(c0.coverage == 0.0);
    CHECK(c0.values.empty());

    std::vector<OsmElement> els;
    for (int i = 0; i < 3; ++i) {
        els.push_back(node(i, {{"historic", "wayside_cross"}, {"material", "wood"}}));
    }
    els.push_back(node(3, {{"historic", "wayside_cross"}, {"material", "stone"}}));
    for (int i = 4; i < 10; ++i) {
        els.push_back(node(i, hwc));
    }
    const auto c = key_coverage(els, "material");
    CHECK(c.coverage == 0.4);
    REQUIRE(c.values.size() == 2);
    CHECK(c.values[0].value == "wood");
    CHECK(c.values[0].count == 3);
    CHECK(c.values[1].value == "stone");

    std::vector<OsmElement> tie{node(1, {{"material", "wood"}}), node(2, {{"material", "metal"}})};
    const auto t = key_coverage(tie, "material");
    CHECK(t.values[0].value == "metal");
}

TEST_CASE("region assignment")
{
    Region r;
    r.region_id = "sq";
    r.area_km2 = 1;
    r.geometry = Polygon{{Ring{{47, 10}, {47, 12}, {49, 12}, {49, 10}, {47, 10}}}};
    Region empty = r;
    empty.region_id = "empty";
    empty.geometry = Polygon{{Ring{{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}}}};
    std::vector<OsmElement> els{node(1, hwc), node(2, hwc)};
    els[1].lat = 10.0;
    OsmElement way = node(3, hwc);
    way.kind = ElementKind::way;
    els.push_back(way);
    const std::vector<Region> regions{r, empty};
    const auto a = assign_to_regions(els, regions);
    REQUIRE(a.groups.size() == 2);
    CHECK(a.groups[0].group_id == "empty");
    CHECK(a.groups[0].members.empty());
    CHECK(a.groups[1].members.size() == 1);
    REQUIRE(a.unassigned.size() == 1);
    CHECK(a.unassigned[0].id == 2);
}
