#pragma once

#include "vgiq/geo.hpp"
#include "vgiq/osm_model.hpp"
#include "vgiq/region.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

namespace vgiq::matching {

struct MatchResult {
    std::string ref_id;
    bool matched = false;
    std::optional<std::int64_t> node_id;
    std::optional<double> distance_m;
    std::optional<std::string> region_id;
};

struct MatchOptions {
    double cutoff_m = 500.0;
    double cell_size_deg = geo::default_cell_size_deg;
    bool include_unclear = true;
    bool include_other = false;
    /// Candidate categories. MTC is not among the defaults.
    std::vector<CrossCategory> categories{CrossCategory::HWC, CrossCategory::HWS,
                                          CrossCategory::MMC, CrossCategory::MC,
                                          CrossCategory::SMY};
    unsigned workers = 1;
};

struct MatchOutput {
    std::vector<MatchResult> results;  // input order of the retained references
    std::size_t skipped_no_location = 0;
    std::size_t skipped_by_class = 0;
    std::size_t degenerate_centroids = 0;
    std::size_t candidate_nodes = 0;
};

/// Each reference independently takes the nearest candidate node to its
/// centroid; a node may match several references. `regions` (optional)
/// assign region_id from the centroid; the first containing region wins.
MatchOutput match_references(std::span<const ReferenceFeature> refs,
                             std::span<const OsmElement> elements,
                             std::span<const Region> regions = {},
                             const MatchOptions& options = {});

struct MatchCurve {
    std::vector<double> radii_m;
    std::vector<double> cumulative_fraction;
    std::size_t n_references = 0;
};

/// Share of results with distance <= r, unmatched results in the
/// denominator. Throws std::invalid_argument unless radii ascend.
MatchCurve matching_curve(std::span<const MatchResult> results, std::span<const double> radii_m);

inline constexpr std::array<double, 3> default_bin_edges{30.0, 50.0, 150.0};

/// Shares of results in [0, e0], (e0, e1], ..., (e_last, inf) where the
/// last bin also holds unmatched results. Size is edges + 1.
std::vector<double> bin_table(std::span<const MatchResult> results,
                              std::span<const double> edges_m = default_bin_edges);

/// Ascending radii 1..max_m step 1.
std::vector<double> default_radii(double max_m = 500.0);

/// Results grouped by region_id (results without a region are dropped).
std::vector<std::pair<std::string, std::vector<MatchResult>>>
results_by_region(std::span<const MatchResult> results);

} // namespace vgiq::matching
