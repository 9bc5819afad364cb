#pragma once

#include "vgiq/error.hpp"
#include "vgiq/osm_model.hpp"
#include "vgiq/region.hpp"
#include "vgiq/timeutil.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vgiq {

enum class SnapshotSource { overpass, file };

/// A dated set of OSM elements, unique per (kind, id).
struct ElementSet {
    std::vector<OsmElement> elements;
    Timestamp snapshot_time{};
    SnapshotSource source = SnapshotSource::file;
};

struct OsmParseResult {
    ElementSet set;
    std::vector<Reject> rejects;
    std::size_t duplicates = 0;  // (kind, id) seen again; the later entry wins
};

/// Parses an Overpass JSON envelope. `snapshot_time` is taken from
/// osm3s.timestamp_osm_base when present, otherwise from `fallback_time`.
/// Throws ParseError (byte offset) on malformed JSON or a missing
/// "elements" array; per-element problems go to the reject list.
OsmParseResult parse_osm_json(std::string_view bytes, Timestamp fallback_time,
                              SnapshotSource source = SnapshotSource::file);

/// Inverse of parse_osm_json for the fields the format expresses.
/// Writes snapshot_time as osm3s.timestamp_osm_base.
std::string serialize_osm_json(const ElementSet& set);

/// Merges element sets; later sets override earlier ones per (kind, id).
/// The merged snapshot time is the earliest of the inputs.
ElementSet merge_element_sets(std::span<const ElementSet> sets);

template <typename T>
struct ParseOutcome {
    std::vector<T> items;
    std::vector<Reject> rejects;
};

/// GeoJSON FeatureCollection of Polygon/MultiPolygon features with
/// properties region_id, name, level, area_km2 (optional census fields
/// catholic_share, protestant_share, population).
ParseOutcome<Region> parse_geojson_regions(std::string_view bytes);

/// GeoJSON FeatureCollection with properties ref_id, classification.
/// A null geometry yields a feature without location.
ParseOutcome<ReferenceFeature> parse_reference_features(std::string_view bytes);

struct CensusRow {
    std::string region_id;
    std::string name;
    double catholic_share = 0.0;
    double protestant_share = 0.0;
    double area_km2 = 0.0;
};

struct CensusTable {
    std::map<std::string, CensusRow> rows;  // keyed by region_id
    std::vector<Reject> rejects;            // Reject::index is the 1-based line
};

/// Semicolon-separated, header
/// `region_id;name;catholic_share;protestant_share;area_km2`.
/// Throws ParseError on a wrong header.
CensusTable parse_census_csv(std::string_view bytes);

/// Copies census shares (and the area when the region lacks one) onto
/// matching regions. Returns the number of regions updated.
std::size_t attach_census(std::span<Region> regions, const CensusTable& census);

} // namespace vgiq
