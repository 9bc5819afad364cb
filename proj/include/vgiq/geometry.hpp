#pragma once

#include <variant>
#include <vector>

namespace vgiq {

/// WGS84 coordinate in decimal degrees.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Closed ring: first vertex equals last.
using Ring = std::vector<GeoPoint>;

/// First ring is the outer boundary, further rings are holes.
struct Polygon {
    std::vector<Ring> rings;
};

struct MultiPolygon {
    std::vector<Polygon> parts;
};

/// monostate stands for "no location".
using Geometry = std::variant<std::monostate, GeoPoint, Polygon, MultiPolygon>;

inline bool is_empty(const Geometry& g) noexcept
{
    return std::holds_alternative<std::monostate>(g);
}

} // namespace vgiq
