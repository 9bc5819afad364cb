#pragma once

#include "vgiq/timeutil.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <stdexcept>
#include <string_view>

namespace vgiq {

enum class ElementKind { node, way, relation };

std::string_view to_string(ElementKind kind);
std::optional<ElementKind> parse_element_kind(std::string_view text);

/// Tag map keyed by NFC-normalized UTF-8 key. std::map keeps keys unique.
using Tags = std::map<std::string, std::string>;

struct OsmElement {
    std::int64_t id = 0;
    ElementKind kind = ElementKind::node;
    double lat = 0.0;  // meaningful only for nodes
    double lon = 0.0;
    Tags tags;
    std::int64_t version = 1;
    Timestamp timestamp{};
    std::string user;
    std::int64_t uid = 0;
    bool has_meta = true;  // false when version/timestamp were absent in the source

    bool is_node() const noexcept { return kind == ElementKind::node; }
};

/// Throws std::invalid_argument if the element violates the model
/// invariants (coordinate ranges for nodes, version >= 1).
void validate(const OsmElement& e);

/// The six cross-like tag combinations.
enum class CrossCategory { HWC, HWS, MMC, MC, MTC, SMY };

inline constexpr std::array<CrossCategory, 6> all_categories{
    CrossCategory::HWC, CrossCategory::HWS, CrossCategory::MMC,
    CrossCategory::MC,  CrossCategory::MTC, CrossCategory::SMY};

struct TagPredicate {
    std::string_view key;
    std::string_view value;
};

/// Defining key=value pair of a category, e.g. historic=wayside_cross.
TagPredicate defining_tag(CrossCategory c) noexcept;

std::string_view to_string(CrossCategory c) noexcept;
std::optional<CrossCategory> parse_category(std::string_view text);

/// Keys treated as edit metadata even when stored as tags.
bool is_meta_key(std::string_view key) noexcept;

using CategorySet = std::set<CrossCategory>;

/// Categories whose defining tag is present. Values are compared exactly
/// after NFC normalization of the element's tags.
CategorySet classify_element(const OsmElement& e);

bool has_category(const OsmElement& e, CrossCategory c);

/// Tags other than the defining tag of `c` and meta keys.
/// Throws std::domain_error("element not in category") when e is not in c.
std::size_t descriptive_tag_count(const OsmElement& e, CrossCategory c);

} // namespace vgiq
