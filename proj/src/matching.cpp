#include "vgiq/matching.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <thread>

namespace vgiq::matching {

namespace {

bool retained(const ReferenceFeature& f, const MatchOptions& o)
{
    switch (f.classification) {
    case ReferenceClass::clearly_cross:
        return true;
    case ReferenceClass::unclear:
        return o.include_unclear;
    case ReferenceClass::other:
        return o.include_other;
    }
    return false;
}

void check_ascending(std::span<const double> values, const char* what)
{
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument(std::string(what) + " must be strictly ascending");
        }
    }
}

} // namespace

MatchOutput match_references(std::span<const ReferenceFeature> refs,
                             std::span<const OsmElement> elements,
                             std::span<const Region> regions, const MatchOptions& options)
{
    if (!(options.cutoff_m > 0.0)) {
        throw std::invalid_argument("match_references: cutoff must be positive");
    }

    std::vector<geo::IndexedPoint> points;
    for (const auto& e : elements) {
        if (!e.is_node()) {
            continue;
        }
        if (std::any_of(options.categories.begin(), options.categories.end(),
                        [&](auto c) { return has_category(e, c); })) {
            points.push_back({e.id, {e.lat, e.lon}});
        }
    }
    const auto index = geo::build_spatial_index(points, options.cell_size_deg);

    MatchOutput out;
    out.candidate_nodes = points.size();

    std::vector<const ReferenceFeature*> work;
    for (const auto& f : refs) {
        if (!f.has_location()) {
            ++out.skipped_no_location;
        } else if (!retained(f, options)) {
            ++out.skipped_by_class;
        } else {
            work.push_back(&f);
        }
    }

    out.results.resize(work.size());
    std::vector<char> degenerate(work.size(), 0);
    auto match_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& f = *work[i];
            const auto centroid = geo::polygon_centroid(f.geometry);
            degenerate[i] = centroid.degenerate;

            MatchResult r;
            r.ref_id = f.ref_id;
            if (const auto hit = index.nearest_within(centroid.point, options.cutoff_m)) {
                r.matched = true;
                r.node_id = hit->id;
                r.distance_m = hit->distance_m;
            }
            for (const auto& region : regions) {
                if (geo::point_in_region(centroid.point, region)) {
                    r.region_id = region.region_id;
                    break;
                }
            }
            out.results[i] = std::move(r);
        }
    };

    const std::size_t workers =
        std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, work.size() / 64));
    if (workers <= 1) {
        match_range(0, work.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (work.size() + workers - 1) / workers;
        for (std::size_t begin = 0; begin < work.size(); begin += chunk) {
            pool.emplace_back(match_range, begin, std::min(work.size(), begin + chunk));
        }
    }
    out.degenerate_centroids =
        static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
    return out;
}

MatchCurve matching_curve(std::span<const MatchResult> results, std::span<const double> radii_m)
{
    check_ascending(radii_m, "radii");
    std::vector<double> distances;
    for (const auto& r : results) {
        if (r.matched) {
            distances.push_back(*r.distance_m);
        }
    }
    std::sort(distances.begin(), distances.end());

    MatchCurve curve;
    curve.n_references = results.size();
    curve.radii_m.assign(radii_m.begin(), radii_m.end());
    for (double radius : radii_m) {
        const auto within = static_cast<std::size_t>(
            std::upper_bound(distances.begin(), distances.end(), radius) - distances.begin());
        curve.cumulative_fraction.push_back(
            results.empty() ? 0.0
                            : static_cast<double>(within) / static_cast<double>(results.size()));
    }
    return curve;
}

std::vector<double> bin_table(std::span<const MatchResult> results, std::span<const double> edges_m)
{
    check_ascending(edges_m, "bin edges");
    std::vector<std::size_t> counts(edges_m.size() + 1, 0);
    for (const auto& r : results) {
        if (!r.matched) {
            ++counts.back();
            continue;
        }
        const auto bin = static_cast<std::size_t>(
            std::lower_bound(edges_m.begin(), edges_m.end(), *r.distance_m) - edges_m.begin());
        ++counts[bin];
    }
    std::vector<double> shares(counts.size(), 0.0);
    if (!results.empty()) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            shares[i] = static_cast<double>(counts[i]) / static_cast<double>(results.size());
        }
    }
    return shares;
}

std::vector<double> default_radii(double max_m)
{
    std::vector<double> radii;
    for (double r = 1.0; r <= max_m; r += 1.0) {
        radii.push_back(r);
    }
    return radii;
}

std::vector<std::pair<std::string, std::vector<MatchResult>>>
results_by_region(std::span<const MatchResult> results)
{
    std::map<std::string, std::vector<MatchResult>> by_region;
    for (const auto& r : results) {
        if (r.region_id) {
            by_region[*r.region_id].push_back(r);
        }
    }
    return {by_region.begin(), by_region.end()};
}

} // namespace vgiq::matching
