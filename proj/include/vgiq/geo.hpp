#pragma once

#include "vgiq/geometry.hpp"
#include "vgiq/region.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vgiq::geo {

/// IUGG mean Earth radius in meters.
inline constexpr double earth_radius_m = 6371008.8;

/// Great-circle distance in meters (haversine formula).
/// Throws std::invalid_argument on non-finite input.
double haversine_distance(const GeoPoint& p, const GeoPoint& q);

struct Centroid {
    GeoPoint point;
    bool degenerate = false;  // zero-area polygon; point is the vertex mean
};

/// Planar area-weighted centroid in lon/lat space. Holes subtract.
/// Throws std::invalid_argument for an empty geometry.
Centroid polygon_centroid(const Geometry& g);

/// Even-odd test over all rings; points on an edge or vertex are inside.
bool point_in_geometry(const GeoPoint& p, const Geometry& g);
bool point_in_region(const GeoPoint& p, const Region& r);

/// Signed planar shoelace area (deg^2) of a closed ring.
double ring_signed_area(const Ring& ring);

struct IndexedPoint {
    std::int64_t id = 0;
    GeoPoint point;
};

struct Nearest {
    std::int64_t id = 0;
    double distance_m = 0.0;
};

inline constexpr double default_cell_size_deg = 0.01;

/// Uniform lat/lon grid; cell = floor(coord / cell_size_deg).
class SpatialIndex {
public:
    using CellKey = std::pair<std::int64_t, std::int64_t>;  // (lat cell, lon cell)

    SpatialIndex(std::span<const IndexedPoint> points, double cell_size_deg);

    double cell_size_deg() const noexcept { return cell_size_; }
    std::size_t point_count() const noexcept { return count_; }
    std::size_t cell_count() const noexcept { return cells_.size(); }

    CellKey cell_of(const GeoPoint& p) const noexcept;

    /// Points stored in one cell (empty span if none).
    std::span<const IndexedPoint> cell(const CellKey& key) const;

    /// Globally nearest point within cutoff_m, ties broken by smaller id.
    std::optional<Nearest> nearest_within(const GeoPoint& q, double cutoff_m) const;

private:
    struct KeyHash {
        std::size_t operator()(const CellKey& k) const noexcept
        {
            return std::hash<std::int64_t>{}(k.first * 0x9E3779B97F4A7C15ull) ^
                   std::hash<std::int64_t>{}(k.second);
        }
    };

    void scan(const std::vector<IndexedPoint>& pts, const GeoPoint& q,
              std::optional<Nearest>& best) const;

    double cell_size_;
    std::size_t count_ = 0;
    std::unordered_map<CellKey, std::vector<IndexedPoint>, KeyHash> cells_;
};

/// Throws std::invalid_argument if cell_size_deg <= 0.
SpatialIndex build_spatial_index(std::span<const IndexedPoint> points,
                                 double cell_size_deg = default_cell_size_deg);

/// Throws std::invalid_argument if cutoff_m <= 0.
std::optional<Nearest> nearest_within(const SpatialIndex& idx, const GeoPoint& q,
                                      double cutoff_m);

} // namespace vgiq::geo
