#include "vgiq/ingest.hpp"

#include "vgiq/unicode.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace vgiq {

using nlohmann::json;

std::string_view to_string(RegionLevel level)
{
    switch (level) {
    case RegionLevel::country:
        return "country";
    case RegionLevel::state:
        return "state";
    case RegionLevel::district:
        return "district";
    case RegionLevel::county:
        return "county";
    }
    return "county";
}

std::optional<RegionLevel> parse_region_level(std::string_view text)
{
    if (text == "country") return RegionLevel::country;
    if (text == "state") return RegionLevel::state;
    if (text == "district") return RegionLevel::district;
    if (text == "county") return RegionLevel::county;
    return std::nullopt;
}

std::string_view to_string(ReferenceClass c)
{
    switch (c) {
    case ReferenceClass::clearly_cross:
        return "clearly_cross";
    case ReferenceClass::unclear:
        return "unclear";
    case ReferenceClass::other:
        return "other";
    }
    return "other";
}

std::optional<ReferenceClass> parse_reference_class(std::string_view text)
{
    if (text == "clearly_cross") return ReferenceClass::clearly_cross;
    if (text == "unclear") return ReferenceClass::unclear;
    if (text == "other") return ReferenceClass::other;
    return std::nullopt;
}

namespace {

json parse_document(std::string_view bytes)
{
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

// Element-level failure; caught per element and turned into a Reject.
struct ElementError {
    std::string reason;
};

OsmElement parse_element(const json& j)
{
    if (!j.is_object()) {
        throw ElementError{"element is not an object"};
    }
    const auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string()) {
        throw ElementError{"missing type"};
    }
    const auto kind = parse_element_kind(type_it->get_ref<const std::string&>());
    if (!kind) {
        throw ElementError{"unknown type " + type_it->get<std::string>()};
    }
    const auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_number_integer()) {
        throw ElementError{"missing or non-integer id"};
    }

    OsmElement e;
    e.kind = *kind;
    e.id = id_it->get<std::int64_t>();

    if (e.is_node()) {
        const auto lat = j.find("lat");
        const auto lon = j.find("lon");
        if (lat == j.end() || lon == j.end() || !lat->is_number() || !lon->is_number()) {
            throw ElementError{"node without coordinates"};
        }
        e.lat = lat->get<double>();
        e.lon = lon->get<double>();
    }

    bool meta = true;
    if (const auto v = j.find("version"); v != j.end()) {
        if (!v->is_number_integer()) {
            throw ElementError{"non-integer version"};
        }
        e.version = v->get<std::int64_t>();
    } else {
        meta = false;
    }
    if (const auto t = j.find("timestamp"); t != j.end()) {
        if (!t->is_string()) {
            throw ElementError{"non-string timestamp"};
        }
        try {
            e.timestamp = parse_iso8601(t->get_ref<const std::string&>());
        } catch (const std::invalid_argument& ex) {
            throw ElementError{ex.what()};
        }
    } else {
        meta = false;
    }
    e.has_meta = meta;
    if (const auto u = j.find("user"); u != j.end() && u->is_string()) {
        e.user = unicode::nfc(u->get_ref<const std::string&>());
    }
    if (const auto u = j.find("uid"); u != j.end() && u->is_number_integer()) {
        e.uid = u->get<std::int64_t>();
    }

    if (const auto tags = j.find("tags"); tags != j.end()) {
        if (!tags->is_object()) {
            throw ElementError{"tags is not an object"};
        }
        for (const auto& [k, v] : tags->items()) {
            if (!v.is_string()) {
                throw ElementError{"tag value for '" + k + "' is not a string"};
            }
            e.tags[unicode::nfc(k)] = unicode::nfc(v.get_ref<const std::string&>());
        }
    }

    try {
        validate(e);
    } catch (const std::invalid_argument& ex) {
        throw ElementError{ex.what()};
    }
    return e;
}

using ElementKey = std::pair<ElementKind, std::int64_t>;

double required_number(const json& props, const char* key)
{
    const auto it = props.find(key);
    if (it == props.end() || !it->is_number()) {
        throw ElementError{std::string("missing numeric property ") + key};
    }
    return it->get<double>();
}

std::string required_string(const json& props, const char* key)
{
    const auto it = props.find(key);
    if (it == props.end()) {
        throw ElementError{std::string("missing property ") + key};
    }
    if (it->is_string()) {
        return unicode::nfc(it->get_ref<const std::string&>());
    }
    if (it->is_number_integer()) {
        return std::to_string(it->get<std::int64_t>());
    }
    throw ElementError{std::string("property ") + key + " is not a string"};
}

GeoPoint parse_position(const json& j)
{
    if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ElementError{"invalid position"};
    }
    GeoPoint p{j[1].get<double>(), j[0].get<double>()};
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || p.lat < -90 || p.lat > 90 ||
        p.lon < -180 || p.lon > 180) {
        throw ElementError{"position out of range"};
    }
    return p;
}

Polygon parse_polygon_coords(const json& j)
{
    if (!j.is_array() || j.empty()) {
        throw ElementError{"polygon without rings"};
    }
    Polygon poly;
    for (const auto& ring_json : j) {
        if (!ring_json.is_array() || ring_json.size() < 4) {
            throw ElementError{"ring with fewer than 4 positions"};
        }
        Ring ring;
        ring.reserve(ring_json.size());
        for (const auto& pos : ring_json) {
            ring.push_back(parse_position(pos));
        }
        if (!(ring.front() == ring.back())) {
            throw ElementError{"unclosed ring"};
        }
        poly.rings.push_back(std::move(ring));
    }
    return poly;
}

Geometry parse_geometry(const json& g)
{
    if (g.is_null()) {
        return std::monostate{};
    }
    if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
        throw ElementError{"invalid geometry"};
    }
    const auto& type = g["type"].get_ref<const std::string&>();
    const auto coords = g.find("coordinates");
    if (coords == g.end()) {
        throw ElementError{"geometry without coordinates"};
    }
    if (type == "Point") {
        return parse_position(*coords);
    }
    if (type == "Polygon") {
        return parse_polygon_coords(*coords);
    }
    if (type == "MultiPolygon") {
        if (!coords->is_array() || coords->empty()) {
            throw ElementError{"empty multipolygon"};
        }
        MultiPolygon mp;
        for (const auto& part : *coords) {
            mp.parts.push_back(parse_polygon_coords(part));
        }
        return mp;
    }
    throw ElementError{"unsupported geometry type " + type};
}

const json& feature_array(const json& doc)
{
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array()) {
        throw ParseError("expected a GeoJSON FeatureCollection", 0);
    }
    return doc["features"];
}

const json& feature_properties(const json& feature)
{
    if (!feature.is_object() || !feature.contains("properties") ||
        !feature["properties"].is_object()) {
        throw ElementError{"feature without properties"};
    }
    return feature["properties"];
}

std::optional<double> parse_decimal(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

void check_shares(double catholic, double protestant)
{
    if (catholic < 0.0 || catholic > 1.0 || protestant < 0.0 || protestant > 1.0) {
        throw ElementError{"census share outside [0, 1]"};
    }
    if (catholic + protestant > 1.0 + 1e-12) {
        throw ElementError{"census shares sum above 1"};
    }
}

} // namespace

OsmParseResult parse_osm_json(std::string_view bytes, Timestamp fallback_time,
                              SnapshotSource source)
{
    const json doc = parse_document(bytes);
    if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array()) {
        throw ParseError("Overpass envelope without \"elements\" array", 0);
    }

    OsmParseResult out;
    out.set.source = source;
    out.set.snapshot_time = fallback_time;
    if (const auto osm3s = doc.find("osm3s"); osm3s != doc.end() && osm3s->is_object()) {
        if (const auto ts = osm3s->find("timestamp_osm_base");
            ts != osm3s->end() && ts->is_string()) {
            try {
                out.set.snapshot_time = parse_iso8601(ts->get_ref<const std::string&>());
            } catch (const std::invalid_argument&) {
                // keep fallback
            }
        }
    }

    std::map<ElementKey, std::size_t> position;
    const auto& elements = doc["elements"];
    for (std::size_t i = 0; i < elements.size(); ++i) {
        try {
            auto e = parse_element(elements[i]);
            const ElementKey key{e.kind, e.id};
            if (const auto it = position.find(key); it != position.end()) {
                out.set.elements[it->second] = std::move(e);
                ++out.duplicates;
            } else {
                position.emplace(key, out.set.elements.size());
                out.set.elements.push_back(std::move(e));
            }
        } catch (const ElementError& err) {
            out.rejects.push_back({i, err.reason});
        }
    }
    return out;
}

std::string serialize_osm_json(const ElementSet& set)
{
    json doc;
    doc["version"] = 0.6;
    doc["generator"] = "vgiq";
    doc["osm3s"] = {{"timestamp_osm_base", format_iso8601(set.snapshot_time)}};
    json elements = json::array();
    for (const auto& e : set.elements) {
        json j;
        j["type"] = std::string(to_string(e.kind));
        j["id"] = e.id;
        if (e.is_node()) {
            j["lat"] = e.lat;
            j["lon"] = e.lon;
        }
        if (e.has_meta) {
            j["version"] = e.version;
            j["timestamp"] = format_iso8601(e.timestamp);
        }
        j["user"] = e.user;
        j["uid"] = e.uid;
        if (!e.tags.empty()) {
            j["tags"] = e.tags;
        }
        elements.push_back(std::move(j));
    }
    doc["elements"] = std::move(elements);
    return doc.dump(1);
}

ElementSet merge_element_sets(std::span<const ElementSet> sets)
{
    ElementSet out;
    if (sets.empty()) {
        return out;
    }
    out.snapshot_time = sets.front().snapshot_time;
    out.source = sets.front().source;
    std::map<ElementKey, std::size_t> position;
    for (const auto& set : sets) {
        out.snapshot_time = std::min(out.snapshot_time, set.snapshot_time);
        for (const auto& e : set.elements) {
            const ElementKey key{e.kind, e.id};
            if (const auto it = position.find(key); it != position.end()) {
                out.elements[it->second] = e;
            } else {
                position.emplace(key, out.elements.size());
                out.elements.push_back(e);
            }
        }
    }
    return out;
}

ParseOutcome<Region> parse_geojson_regions(std::string_view bytes)
{
    const json doc = parse_document(bytes);
    const auto& features = feature_array(doc);
    ParseOutcome<Region> out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        try {
            const auto& props = feature_properties(features[i]);
            Region r;
            r.region_id = required_string(props, "region_id");
            if (r.region_id.empty()) {
                throw ElementError{"empty region_id"};
            }
            r.name = required_string(props, "name");
            const auto level = parse_region_level(required_string(props, "level"));
            if (!level) {
                throw ElementError{"unknown level"};
            }
            r.level = *level;
            r.area_km2 = required_number(props, "area_km2");
            if (!(r.area_km2 > 0.0)) {
                throw ElementError{"area_km2 must be positive"};
            }
            r.geometry = parse_geometry(features[i].value("geometry", json()));
            if (!std::holds_alternative<Polygon>(r.geometry) &&
                !std::holds_alternative<MultiPolygon>(r.geometry)) {
                throw ElementError{"region geometry must be a polygon or multipolygon"};
            }
            if (props.contains("catholic_share") || props.contains("protestant_share")) {
                Census c;
                c.catholic_share = required_number(props, "catholic_share");
                c.protestant_share = required_number(props, "protestant_share");
                check_shares(c.catholic_share, c.protestant_share);
                if (const auto pop = props.find("population");
                    pop != props.end() && pop->is_number_integer()) {
                    c.population = pop->get<std::int64_t>();
                }
                r.census = c;
            }
            out.items.push_back(std::move(r));
        } catch (const ElementError& err) {
            out.rejects.push_back({i, err.reason});
        }
    }
    return out;
}

ParseOutcome<ReferenceFeature> parse_reference_features(std::string_view bytes)
{
    const json doc = parse_document(bytes);
    const auto& features = feature_array(doc);
    ParseOutcome<ReferenceFeature> out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        try {
            const auto& props = feature_properties(features[i]);
            ReferenceFeature f;
            f.ref_id = required_string(props, "ref_id");
            const auto cls = parse_reference_class(required_string(props, "classification"));
            if (!cls) {
                throw ElementError{"unknown classification"};
            }
            f.classification = *cls;
            f.geometry = parse_geometry(features[i].value("geometry", json()));
            out.items.push_back(std::move(f));
        } catch (const ElementError& err) {
            out.rejects.push_back({i, err.reason});
        }
    }
    return out;
}

CensusTable parse_census_csv(std::string_view bytes)
{
    static constexpr std::string_view header =
        "region_id;name;catholic_share;protestant_share;area_km2";
    if (bytes.starts_with("\xEF\xBB\xBF")) {
        bytes.remove_prefix(3);
    }

    CensusTable out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool seen_header = false;
    while (start <= bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) {
            end = bytes.size();
        }
        auto line = bytes.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!seen_header) {
            if (line != header) {
                throw ParseError("census CSV: unexpected header", line_no);
            }
            seen_header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ';');
        try {
            if (fields.size() != 5) {
                throw ElementError{"expected 5 fields"};
            }
            if (fields[0].empty()) {
                throw ElementError{"missing region_id"};
            }
            const auto cath = parse_decimal(fields[2]);
            const auto prot = parse_decimal(fields[3]);
            const auto area = parse_decimal(fields[4]);
            if (!cath || !prot || !area) {
                throw ElementError{"invalid number"};
            }
            check_shares(*cath, *prot);
            if (!(*area > 0.0)) {
                throw ElementError{"area_km2 must be positive"};
            }
            CensusRow row{std::string(fields[0]), unicode::nfc(fields[1]), *cath, *prot, *area};
            out.rows[row.region_id] = std::move(row);
        } catch (const ElementError& err) {
            out.rejects.push_back({line_no, err.reason});
        }
    }
    if (!seen_header) {
        throw ParseError("census CSV: empty input", 1);
    }
    return out;
}

std::size_t attach_census(std::span<Region> regions, const CensusTable& census)
{
    std::size_t n = 0;
    for (auto& r : regions) {
        const auto it = census.rows.find(r.region_id);
        if (it == census.rows.end()) {
            continue;
        }
        Census c;
        c.catholic_share = it->second.catholic_share;
        c.protestant_share = it->second.protestant_share;
        if (r.census) {
            c.population = r.census->population;
        }
        r.census = c;
        if (!(r.area_km2 > 0.0)) {
            r.area_km2 = it->second.area_km2;
        }
        ++n;
    }
    return n;
}

} // namespace vgiq
