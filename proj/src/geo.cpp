#include "vgiq/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgiq::geo {

namespace {

constexpr double deg_to_rad = std::numbers::pi / 180.0;
constexpr double edge_eps = 1e-12;

bool better(double d, std::int64_t id, const std::optional<Nearest>& best)
{
    return !best || d < best->distance_m || (d == best->distance_m && id < best->id);
}

// Moments of one closed ring relative to `origin`.
struct RingMoments {
    double area = 0.0;  // signed
    double mx = 0.0;    // sum of (x_i + x_j) * cross
    double my = 0.0;
};

RingMoments ring_moments(const Ring& ring, const GeoPoint& origin)
{
    RingMoments m;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double x0 = ring[i].lon - origin.lon;
        const double y0 = ring[i].lat - origin.lat;
        const double x1 = ring[i + 1].lon - origin.lon;
        const double y1 = ring[i + 1].lat - origin.lat;
        const double cross = x0 * y1 - x1 * y0;
        m.area += cross;
        m.mx += (x0 + x1) * cross;
        m.my += (y0 + y1) * cross;
    }
    m.area *= 0.5;
    return m;
}

struct WeightedCentroid {
    GeoPoint point;
    double area = 0.0;  // unsigned, holes subtracted
};

std::optional<WeightedCentroid> polygon_part_centroid(const Polygon& poly)
{
    if (poly.rings.empty() || poly.rings.front().size() < 2) {
        return std::nullopt;
    }
    const GeoPoint origin = poly.rings.front().front();
    double area = 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t r = 0; r < poly.rings.size(); ++r) {
        const auto m = ring_moments(poly.rings[r], origin);
        // Orientation-independent: outer ring adds, holes subtract.
        const double sign = (r == 0 ? 1.0 : -1.0) * (m.area < 0.0 ? -1.0 : 1.0);
        area += sign * m.area;
        mx += sign * m.mx;
        my += sign * m.my;
    }
    if (!(std::abs(area) > 0.0)) {
        return std::nullopt;
    }
    // ring moments integrate to 6 * A * centroid
    return WeightedCentroid{{origin.lat + my / (6.0 * area), origin.lon + mx / (6.0 * area)},
                            area};
}

void add_vertices(const Polygon& poly, double& lat, double& lon, std::size_t& n)
{
    for (const auto& ring : poly.rings) {
        const std::size_t count =
            ring.size() > 1 && ring.front() == ring.back() ? ring.size() - 1 : ring.size();
        for (std::size_t i = 0; i < count; ++i) {
            lat += ring[i].lat;
            lon += ring[i].lon;
            ++n;
        }
    }
}

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b)
{
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::abs(cross) > edge_eps) {
        return false;
    }
    return p.lon >= std::min(a.lon, b.lon) - edge_eps && p.lon <= std::max(a.lon, b.lon) + edge_eps &&
           p.lat >= std::min(a.lat, b.lat) - edge_eps && p.lat <= std::max(a.lat, b.lat) + edge_eps;
}

// nullopt: on the boundary
std::optional<bool> polygon_parity(const GeoPoint& p, const Polygon& poly)
{
    bool inside = false;
    for (const auto& ring : poly.rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            const auto& a = ring[i];
            const auto& b = ring[i + 1];
            if (on_segment(p, a, b)) {
                return std::nullopt;
            }
            if ((a.lat > p.lat) != (b.lat > p.lat)) {
                const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
                if (p.lon < x) {
                    inside = !inside;
                }
            }
        }
    }
    return inside;
}

bool in_polygon(const GeoPoint& p, const Polygon& poly)
{
    const auto parity = polygon_parity(p, poly);
    return !parity || *parity;
}

} // namespace

double haversine_distance(const GeoPoint& p, const GeoPoint& q)
{
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(q.lat) ||
        !std::isfinite(q.lon)) {
        throw std::invalid_argument("haversine_distance: non-finite coordinate");
    }
    const double phi1 = p.lat * deg_to_rad;
    const double phi2 = q.lat * deg_to_rad;
    const double sdphi = std::sin((phi2 - phi1) / 2.0);
    const double sdlambda = std::sin((q.lon - p.lon) * deg_to_rad / 2.0);
    const double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlambda * sdlambda;
    return 2.0 * earth_radius_m * std::asin(std::min(1.0, std::sqrt(h)));
}

double ring_signed_area(const Ring& ring)
{
    if (ring.empty()) {
        return 0.0;
    }
    return ring_moments(ring, ring.front()).area;
}

Centroid polygon_centroid(const Geometry& g)
{
    if (const auto* pt = std::get_if<GeoPoint>(&g)) {
        return {*pt, false};
    }

    std::vector<const Polygon*> parts;
    if (const auto* poly = std::get_if<Polygon>(&g)) {
        parts.push_back(poly);
    } else if (const auto* multi = std::get_if<MultiPolygon>(&g)) {
        for (const auto& part : multi->parts) {
            parts.push_back(&part);
        }
    }
    if (parts.empty()) {
        throw std::invalid_argument("polygon_centroid: empty geometry");
    }

    double total = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    for (const auto* part : parts) {
        if (auto c = polygon_part_centroid(*part)) {
            total += c->area;
            lat += c->area * c->point.lat;
            lon += c->area * c->point.lon;
        }
    }
    if (total > 0.0) {
        return {{lat / total, lon / total}, false};
    }

    double vlat = 0.0;
    double vlon = 0.0;
    std::size_t n = 0;
    for (const auto* part : parts) {
        add_vertices(*part, vlat, vlon, n);
    }
    if (n == 0) {
        throw std::invalid_argument("polygon_centroid: geometry without vertices");
    }
    return {{vlat / static_cast<double>(n), vlon / static_cast<double>(n)}, true};
}

bool point_in_geometry(const GeoPoint& p, const Geometry& g)
{
    if (const auto* poly = std::get_if<Polygon>(&g)) {
        return in_polygon(p, *poly);
    }
    if (const auto* multi = std::get_if<MultiPolygon>(&g)) {
        return std::any_of(multi->parts.begin(), multi->parts.end(),
                           [&](const Polygon& part) { return in_polygon(p, part); });
    }
    if (const auto* pt = std::get_if<GeoPoint>(&g)) {
        return *pt == p;
    }
    return false;
}

bool point_in_region(const GeoPoint& p, const Region& r)
{
    return point_in_geometry(p, r.geometry);
}

SpatialIndex::SpatialIndex(std::span<const IndexedPoint> points, double cell_size_deg)
    : cell_size_(cell_size_deg)
{
    if (!(cell_size_deg > 0.0) || !std::isfinite(cell_size_deg)) {
        throw std::invalid_argument("cell_size_deg must be positive");
    }
    for (const auto& p : points) {
        cells_[cell_of(p.point)].push_back(p);
        ++count_;
    }
}

SpatialIndex::CellKey SpatialIndex::cell_of(const GeoPoint& p) const noexcept
{
    return {static_cast<std::int64_t>(std::floor(p.lat / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.lon / cell_size_))};
}

std::span<const IndexedPoint> SpatialIndex::cell(const CellKey& key) const
{
    const auto it = cells_.find(key);
    if (it == cells_.end()) {
        return {};
    }
    return it->second;
}

void SpatialIndex::scan(const std::vector<IndexedPoint>& pts, const GeoPoint& q,
                        std::optional<Nearest>& best) const
{
    for (const auto& p : pts) {
        const double d = haversine_distance(q, p.point);
        if (better(d, p.id, best)) {
            best = Nearest{p.id, d};
        }
    }
}

std::optional<Nearest> SpatialIndex::nearest_within(const GeoPoint& q, double cutoff_m) const
{
    if (!(cutoff_m > 0.0)) {
        throw std::invalid_argument("cutoff_m must be positive");
    }
    if (count_ == 0) {
        return std::nullopt;
    }

    const auto [ci, cj] = cell_of(q);
    const double cutoff_deg = cutoff_m / earth_radius_m / deg_to_rad;
    // Any point within the cutoff has |lat| <= max_lat; a meridian-parallel
    // gap of dlon degrees is then at least this far on the sphere.
    const double max_lat = std::min(90.0, std::abs(q.lat) + cutoff_deg);
    const double cos_min = std::cos(max_lat * deg_to_rad);

    std::optional<Nearest> best;
    for (std::int64_t r = 0;; ++r) {
        if (r > 0) {
            const double lat_gap = std::max(
                0.0, std::min(q.lat - static_cast<double>(ci - r + 1) * cell_size_,
                              static_cast<double>(ci + r) * cell_size_ - q.lat));
            const double lon_gap = std::max(
                0.0, std::min(q.lon - static_cast<double>(cj - r + 1) * cell_size_,
                              static_cast<double>(cj + r) * cell_size_ - q.lon));
            const double lat_bound = earth_radius_m * lat_gap * deg_to_rad;
            const double lon_bound =
                2.0 * earth_radius_m *
                std::asin(std::min(1.0, cos_min * std::sin(std::min(lon_gap, 180.0) *
                                                           deg_to_rad / 2.0)));
            const double bound = std::min(lat_bound, lon_bound);
            const double limit = best ? std::min(best->distance_m, cutoff_m) : cutoff_m;
            if (bound > limit) {
                break;
            }
        }

        const auto side = static_cast<std::size_t>(2 * r + 1);
        if (side * side > 4 * cells_.size() + 8) {
            // The ring now covers more cells than exist; finish exhaustively.
            for (const auto& [key, pts] : cells_) {
                scan(pts, q, best);
            }
            break;
        }

        for (std::int64_t di = -r; di <= r; ++di) {
            const bool edge_row = (di == -r || di == r);
            for (std::int64_t dj = -r; dj <= r; dj += (edge_row ? 1 : 2 * r)) {
                const auto it = cells_.find({ci + di, cj + dj});
                if (it != cells_.end()) {
                    scan(it->second, q, best);
                }
                if (r == 0) {
                    break;
                }
            }
        }
    }

    if (best && best->distance_m <= cutoff_m) {
        return best;
    }
    return std::nullopt;
}

SpatialIndex build_spatial_index(std::span<const IndexedPoint> points, double cell_size_deg)
{
    return SpatialIndex(points, cell_size_deg);
}

std::optional<Nearest> nearest_within(const SpatialIndex& idx, const GeoPoint& q, double cutoff_m)
{
    return idx.nearest_within(q, cutoff_m);
}

} // namespace vgiq::geo
