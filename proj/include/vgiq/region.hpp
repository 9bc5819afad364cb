#pragma once

#include "vgiq/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vgiq {

enum class RegionLevel { country, state, district, county };

std::string_view to_string(RegionLevel level);
std::optional<RegionLevel> parse_region_level(std::string_view text);

struct Census {
    double catholic_share = 0.0;    // fraction in [0, 1]
    double protestant_share = 0.0;  // fraction in [0, 1]
    std::optional<std::int64_t> population;
};

/// Named polygon used as aggregation unit.
struct Region {
    std::string region_id;
    std::string name;
    RegionLevel level = RegionLevel::county;
    Geometry geometry;  // Polygon or MultiPolygon
    double area_km2 = 0.0;
    std::optional<Census> census;
};

enum class ReferenceClass { clearly_cross, unclear, other };

std::string_view to_string(ReferenceClass c);
std::optional<ReferenceClass> parse_reference_class(std::string_view text);

/// One entry of an external register.
struct ReferenceFeature {
    std::string ref_id;
    Geometry geometry;
    ReferenceClass classification = ReferenceClass::clearly_cross;

    bool has_location() const noexcept { return !is_empty(geometry); }
};

} // namespace vgiq
