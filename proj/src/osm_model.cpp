#include "vgiq/osm_model.hpp"

#include "vgiq/unicode.hpp"

#include <cmath>
#include <stdexcept>

namespace vgiq {

std::string_view to_string(ElementKind kind)
{
    switch (kind) {
    case ElementKind::node:
        return "node";
    case ElementKind::way:
        return "way";
    case ElementKind::relation:
        return "relation";
    }
    return "node";
}

std::optional<ElementKind> parse_element_kind(std::string_view text)
{
    if (text == "node") return ElementKind::node;
    if (text == "way") return ElementKind::way;
    if (text == "relation") return ElementKind::relation;
    return std::nullopt;
}

void validate(const OsmElement& e)
{
    if (e.is_node()) {
        if (!std::isfinite(e.lat) || !std::isfinite(e.lon) || e.lat < -90.0 || e.lat > 90.0 ||
            e.lon < -180.0 || e.lon > 180.0) {
            throw std::invalid_argument("node coordinates out of range");
        }
    }
    if (e.version < 1) {
        throw std::invalid_argument("version must be >= 1");
    }
}

TagPredicate defining_tag(CrossCategory c) noexcept
{
    switch (c) {
    case CrossCategory::HWC:
        return {"historic", "wayside_cross"};
    case CrossCategory::HWS:
        return {"historic", "wayside_shrine"};
    case CrossCategory::MMC:
        return {"man_made", "cross"};
    case CrossCategory::MC:
        return {"memorial", "cross"};
    case CrossCategory::MTC:
        return {"memorial:type", "cross"};
    case CrossCategory::SMY:
        return {"summit:cross", "yes"};
    }
    return {"", ""};
}

std::string_view to_string(CrossCategory c) noexcept
{
    switch (c) {
    case CrossCategory::HWC:
        return "HWC";
    case CrossCategory::HWS:
        return "HWS";
    case CrossCategory::MMC:
        return "MMC";
    case CrossCategory::MC:
        return "MC";
    case CrossCategory::MTC:
        return "MTC";
    case CrossCategory::SMY:
        return "SMY";
    }
    return "";
}

std::optional<CrossCategory> parse_category(std::string_view text)
{
    for (auto c : all_categories) {
        if (to_string(c) == text) {
            return c;
        }
    }
    return std::nullopt;
}

bool is_meta_key(std::string_view key) noexcept
{
    return key == "version" || key == "id" || key == "timestamp" || key == "user" ||
           key == "uid" || key == "changeset";
}

namespace {

bool tag_matches(const Tags& tags, TagPredicate pred)
{
    const auto it = tags.find(std::string(pred.key));
    if (it != tags.end()) {
        return it->second == pred.value;
    }
    return false;
}

// Tag maps built by the parsers are already NFC; elements built in code may
// not be, so fall back to a normalizing scan when the fast lookup misses.
bool tag_matches_normalized(const Tags& tags, TagPredicate pred)
{
    if (tag_matches(tags, pred)) {
        return true;
    }
    for (const auto& [k, v] : tags) {
        if (unicode::nfc(k) == pred.key && unicode::nfc(v) == pred.value) {
            return true;
        }
    }
    return false;
}

} // namespace

CategorySet classify_element(const OsmElement& e)
{
    CategorySet out;
    for (auto c : all_categories) {
        if (tag_matches_normalized(e.tags, defining_tag(c))) {
            out.insert(c);
        }
    }
    return out;
}

bool has_category(const OsmElement& e, CrossCategory c)
{
    return tag_matches_normalized(e.tags, defining_tag(c));
}

std::size_t descriptive_tag_count(const OsmElement& e, CrossCategory c)
{
    if (!has_category(e, c)) {
        throw std::domain_error("element not in category");
    }
    const auto def = defining_tag(c);
    std::size_t n = 0;
    for (const auto& [k, v] : e.tags) {
        const auto key = unicode::nfc(k);
        if (is_meta_key(key)) {
            continue;
        }
        if (key == def.key && unicode::nfc(v) == def.value) {
            continue;
        }
        ++n;
    }
    return n;
}

} // namespace vgiq
