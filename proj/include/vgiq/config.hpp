#pragma once

#include "vgiq/error.hpp"
#include "vgiq/osm_model.hpp"
#include "vgiq/region.hpp"
#include "vgiq/timeutil.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vgiq {

inline constexpr const char* endpoint_env_var = "VGIQ_OVERPASS_ENDPOINT";

struct TagFilter {
    std::string key;
    std::string value;
};

struct FetchConfig {
    std::vector<std::string> areas;    // ISO 3166 codes
    std::vector<TagFilter> tags;       // defaults to the six category tags
    int timeout_s = 180;
    int retries = 3;
    double backoff_base_s = 10.0;
    unsigned workers = 2;
};

struct DensityRange {
    std::string region_id;
    double d_lo = 0.0;
    double d_hi = 0.0;
};

struct EstimateConfig {
    CrossCategory category = CrossCategory::HWC;
    double lo_radius_m = 50.0;   // its efficiency bounds the total from above
    double hi_radius_m = 150.0;
    bool statewide = false;
    std::vector<DensityRange> density_ranges;
};

struct TextConfig {
    CrossCategory category = CrossCategory::HWC;
    std::vector<std::string> keys{"name", "inscription"};
    std::size_t split_at = 20;
    std::size_t top_n = 10;
    std::map<std::string, std::filesystem::path> tagged_paths;  // key -> TSV
};

struct ComparisonConfig {
    std::string label;
    std::vector<std::filesystem::path> snapshot_paths;
};

struct RunConfig {
    std::optional<std::string> overpass_endpoint;
    std::vector<std::filesystem::path> snapshot_paths;
    std::vector<CrossCategory> categories{all_categories.begin(), all_categories.end()};
    CrossCategory analysis_category = CrossCategory::HWC;
    std::filesystem::path regions_path;
    std::optional<std::filesystem::path> references_path;
    std::optional<std::filesystem::path> census_path;
    std::optional<std::filesystem::path> lexicon_path;
    std::map<std::string, std::filesystem::path> corpora_paths;  // label -> TSV
    double cutoff_m = 500.0;
    std::vector<double> radii_m;  // defaults to 1..cutoff step 1
    std::vector<double> bin_edges_m{30.0, 50.0, 150.0};
    bool include_unclear = true;
    bool include_other = false;
    RegionLevel group_level = RegionLevel::district;
    RegionLevel density_level = RegionLevel::county;
    std::vector<std::string> coverage_keys{"material", "religion"};
    bool fit_log_space = false;
    std::optional<Timestamp> reference_time;
    unsigned workers = 0;  // 0: hardware concurrency
    std::filesystem::path output_dir = "out";
    FetchConfig fetch;
    EstimateConfig estimate;
    TextConfig text;
    std::vector<ComparisonConfig> comparisons;
};

/// Relative paths resolve against `base_dir`. The endpoint environment
/// variable overrides the configured endpoint. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads and parses a JSON config file. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Checks cross-field constraints (input source present, radii ascending
/// and within the cutoff, ...). Throws ConfigError.
void validate(const RunConfig& config);

unsigned effective_workers(const RunConfig& config);

} // namespace vgiq
