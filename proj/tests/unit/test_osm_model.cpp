#include "doctest.h"

#include "vgiq/osm_model.hpp"

#include <algorithm>
#include <random>
#include <vector>

using namespace vgiq;

namespace {

OsmElement node(Tags tags)
{
    OsmElement e;
    e.id = 1;
    e.lat = 48.0;
    e.lon = 11.5;
    e.tags = std::move(tags);
    return e;
}

} // namespace

TEST_CASE("classify single defining tag")
{
    CHECK(classify_element(node({{"historic", "wayside_cross"}})) ==
          CategorySet{CrossCategory::HWC});
}

TEST_CASE("classify dual membership")
{
    CHECK(classify_element(node({{"man_made", "cross"}, {"summit:cross", "yes"}})) ==
          CategorySet{CrossCategory::MMC, CrossCategory::SMY});
}

TEST_CASE("classify non-matching value")
{
    CHECK(classify_element(node({{"historic", "castle"}})).empty());
}

TEST_CASE("classification is case sensitive")
{
    CHECK(classify_element(node({{"historic", "Wayside_Cross"}})).empty());
    CHECK(classify_element(node({{"Historic", "wayside_cross"}})).empty());
}

TEST_CASE("all six predicates")
{
    for (auto c : all_categories) {
        const auto def = defining_tag(c);
        const auto e = node({{std::string(def.key), std::string(def.value)}});
        CHECK(classify_element(e) == CategorySet{c});
        CHECK(parse_category(to_string(c)) == c);
    }
}

TEST_CASE("classification ignores tag order")
{
    // Tags is an ordered map; build the same content in shuffled insertion
    // orders and with extra keys.
    std::vector<std::pair<std::string, std::string>> kv{
        {"memorial", "cross"}, {"name", "x"}, {"historic", "wayside_shrine"}, {"material", "wood"}};
    std::mt19937 rng(7);
    const auto expected = CategorySet{CrossCategory::HWS, CrossCategory::MC};
    for (int i = 0; i < 20; ++i) {
        std::shuffle(kv.begin(), kv.end(), rng);
        Tags tags;
        for (const auto& [k, v] : kv) {
            tags.emplace(k, v);
        }
        CHECK(classify_element(node(tags)) == expected);
    }
}

TEST_CASE("descriptive tag counts")
{
    CHECK(descriptive_tag_count(node({{"historic", "wayside_cross"}}), CrossCategory::HWC) == 0);
    CHECK(descriptive_tag_count(node({{"historic", "wayside_cross"},
                                      {"religion", "christian"},
                                      {"material", "wood"}}),
                                CrossCategory::HWC) == 2);
    CHECK(descriptive_tag_count(node({{"historic", "wayside_cross"},
                                      {"name", "Neunerkreuz"},
                                      {"inscription", "INRI"},
                                      {"start_date", "1850"}}),
                                CrossCategory::HWC) == 3);
}

TEST_CASE("meta keys stored as tags are not descriptive")
{
    const auto e = node({{"historic", "wayside_cross"},
                         {"version", "3"},
                         {"id", "5"},
                         {"timestamp", "x"},
                         {"user", "u"},
                         {"uid", "9"},
                         {"changeset", "1"},
                         {"material", "stone"}});
    CHECK(descriptive_tag_count(e, CrossCategory::HWC) == 1);
}

TEST_CASE("other category defining tags count as descriptive")
{
    const auto e = node({{"historic", "wayside_cross"}, {"man_made", "cross"}});
    CHECK(descriptive_tag_count(e, CrossCategory::HWC) == 1);
    CHECK(descriptive_tag_count(e, CrossCategory::MMC) == 1);
}

TEST_CASE("descriptive count outside category is a domain error")
{
    CHECK_THROWS_AS(descriptive_tag_count(node({{"historic", "castle"}}), CrossCategory::HWC),
                    std::domain_error);
}

TEST_CASE("NFC-equivalent tags classify identically")
{
    // "é" precomposed vs e + combining acute, in a non-defining tag, and a
    // decomposed defining value that only matches after normalization.
    OsmElement e = node({{"historic", "wayside_cross"}, {"name", "Croix de Ne\xCC\x81"}});
    CHECK(classify_element(e) == CategorySet{CrossCategory::HWC});
    CHECK(descriptive_tag_count(e, CrossCategory::HWC) == 1);
}

TEST_CASE("validation of node coordinates and version")
{
    auto e = node({});
    CHECK_NOTHROW(validate(e));
    e.lat = 91.0;
    CHECK_THROWS_AS(validate(e), std::invalid_argument);
    e.lat = 0.0;
    e.version = 0;
    CHECK_THROWS_AS(validate(e), std::invalid_argument);
}
