#pragma once

#include "vgiq/error.hpp"
#include "vgiq/osm_model.hpp"
#include "vgiq/region.hpp"
#include "vgiq/timeutil.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vgiq::metrics {

/// Elements sharing an aggregation unit (usually a region).
struct ElementGroup {
    std::string group_id;
    std::vector<OsmElement> members;
};

/// Groups sorted by group_id.
using Grouping = std::vector<ElementGroup>;

struct RegionAssignment {
    Grouping groups;                      // one group per region, even if empty
    std::vector<OsmElement> unassigned;   // nodes inside no region
};

/// Assigns nodes to every region containing them. Non-nodes are ignored.
RegionAssignment assign_to_regions(std::span<const OsmElement> elements,
                                   std::span<const Region> regions);

Grouping single_group(std::span<const OsmElement> elements, std::string group_id);

// ---------------------------------------------------------------------------
// co-occurrence

/// entry(A, B) = |A and B| / |A|. The diagonal is absent and rows with a
/// zero denominator have no entries.
struct CooccurrenceMatrix {
    std::vector<CrossCategory> categories;
    std::vector<std::size_t> counts;                 // |A|
    std::vector<std::vector<std::size_t>> joint;     // |A and B|, symmetric
    std::vector<std::vector<std::optional<double>>> share;
};

CooccurrenceMatrix cooccurrence_matrix(std::span<const OsmElement> elements,
                                       std::span<const CrossCategory> cats);

// ---------------------------------------------------------------------------
// age

inline constexpr double age_bin_days = 90.0;

struct AgeStats {
    std::string group_id;
    std::size_t n = 0;
    double median_days = 0.0;
    double q1_days = 0.0;
    double q3_days = 0.0;
    double whisker_lo_days = 0.0;
    double whisker_hi_days = 0.0;
    std::vector<std::pair<double, std::size_t>> histogram;  // (bin start, count)
};

/// Linear interpolation between order statistics at h = (n - 1) q.
/// `sorted` must be ascending and non-empty.
double quantile(std::span<const double> sorted, double q);

/// Box statistics over a list of ages. Throws std::invalid_argument when
/// `ages_days` is empty.
AgeStats summarize_ages(std::string group_id, std::vector<double> ages_days);

struct AgeReport {
    std::vector<AgeStats> groups;  // empty groups are omitted
    std::vector<Reject> rejects;   // Reject::index is the element id
};

/// Age = reference_time - timestamp (time since last change).
AgeReport age_stats(const Grouping& groups, Timestamp reference_time);

// ---------------------------------------------------------------------------
// versions

/// Shares of versions 1, 2, 3 and 4+. All zero for empty input.
using VersionHistogram = std::array<double, 4>;

VersionHistogram version_histogram(std::span<const OsmElement> elements);

// ---------------------------------------------------------------------------
// contributors

struct InequalityStat {
    double gini = 0.0;
    std::size_t n_contributors = 0;
    double top_contributor_share = 0.0;
};

/// G = sum_ij |x_i - x_j| / (2 n sum_i x_i), via the sorted formula.
/// Throws std::domain_error when no count is positive.
InequalityStat gini(std::span<const std::int64_t> counts);

/// Node count per uid, ascending by uid.
std::vector<std::pair<std::int64_t, std::int64_t>>
contributions_by_uid(std::span<const OsmElement> elements);

// ---------------------------------------------------------------------------
// richness and coverage

struct KeyShare {
    std::string key;
    double share = 0.0;
};

struct RichnessRow {
    std::string group_id;
    std::size_t n = 0;
    std::optional<double> mean_descriptive;  // absent for empty groups
    std::vector<KeyShare> key_frequencies;   // descending share, ties by key
};

/// Elements outside `cat` are skipped.
std::vector<RichnessRow> tag_richness(const Grouping& groups, CrossCategory cat);

struct ValueCount {
    std::string value;
    std::size_t count = 0;
};

struct KeyCoverage {
    std::string key;
    std::size_t n_elements = 0;
    double coverage = 0.0;
    std::vector<ValueCount> values;  // descending count, ties by value
};

KeyCoverage key_coverage(std::span<const OsmElement> elements, const std::string& key);

// ---------------------------------------------------------------------------

/// Elements in category `c`, optionally restricted to nodes.
std::vector<OsmElement> filter_category(std::span<const OsmElement> elements, CrossCategory c,
                                        bool nodes_only = true);

/// Elements in any of `cats`, each element at most once.
std::vector<OsmElement> filter_any(std::span<const OsmElement> elements,
                                   std::span<const CrossCategory> cats, bool nodes_only = true);

} // namespace vgiq::metrics
