#include "vgiq/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace vgiq {

using nlohmann::json;

namespace {

const std::set<std::string> known_keys{
    "overpass_endpoint", "snapshot_paths", "categories",    "analysis_category",
    "regions_path",      "references_path", "census_path",  "lexicon_path",
    "corpora_paths",     "cutoff_m",        "radii_m",      "bin_edges_m",
    "include_unclear",   "include_other",   "group_level",  "density_level",
    "coverage_keys",     "fit_log_space",   "reference_time", "workers",
    "output_dir",        "fetch",           "estimate",     "text",
    "comparisons",       "$schema",         "description"};

template <typename T>
T get_as(const json& j, const std::string& field)
{
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + field + "' has the wrong type");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out)
{
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        out = get_as<T>(*it, key);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void read_path(const json& obj, const char* key, const std::filesystem::path& base,
               std::optional<std::filesystem::path>& out)
{
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        out = resolve(base, get_as<std::string>(*it, key));
    }
}

std::vector<std::filesystem::path> read_paths(const json& obj, const char* key,
                                              const std::filesystem::path& base)
{
    std::vector<std::filesystem::path> out;
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        for (const auto& p : get_as<std::vector<std::string>>(*it, key)) {
            out.push_back(resolve(base, p));
        }
    }
    return out;
}

std::map<std::string, std::filesystem::path> read_path_map(const json& obj, const char* key,
                                                           const std::filesystem::path& base)
{
    std::map<std::string, std::filesystem::path> out;
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        for (const auto& [label, p] : get_as<std::map<std::string, std::string>>(*it, key)) {
            out[label] = resolve(base, p);
        }
    }
    return out;
}

CrossCategory category_of(const std::string& text, const char* field)
{
    const auto c = parse_category(text);
    if (!c) {
        throw ConfigError(std::string("unknown category '") + text + "' in " + field);
    }
    return *c;
}

RegionLevel level_of(const std::string& text, const char* field)
{
    const auto l = parse_region_level(text);
    if (!l) {
        throw ConfigError(std::string("unknown region level '") + text + "' in " + field);
    }
    return *l;
}

const json& section(const json& doc, const char* key)
{
    static const json empty = json::object();
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return empty;
    }
    if (!it->is_object()) {
        throw ConfigError(std::string("config field '") + key + "' must be an object");
    }
    return *it;
}

} // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!known_keys.contains(key)) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }

    RunConfig c;
    std::string endpoint;
    read(doc, "overpass_endpoint", endpoint);
    if (!endpoint.empty()) {
        c.overpass_endpoint = endpoint;
    }
    if (const char* env = std::getenv(endpoint_env_var); env != nullptr && *env != '\0') {
        c.overpass_endpoint = env;
    }

    c.snapshot_paths = read_paths(doc, "snapshot_paths", base_dir);
    if (doc.contains("categories")) {
        c.categories.clear();
        for (const auto& s : get_as<std::vector<std::string>>(doc["categories"], "categories")) {
            c.categories.push_back(category_of(s, "categories"));
        }
    }
    if (doc.contains("analysis_category")) {
        c.analysis_category =
            category_of(get_as<std::string>(doc["analysis_category"], "analysis_category"),
                        "analysis_category");
    }

    std::optional<std::filesystem::path> regions;
    read_path(doc, "regions_path", base_dir, regions);
    if (regions) {
        c.regions_path = *regions;
    }
    read_path(doc, "references_path", base_dir, c.references_path);
    read_path(doc, "census_path", base_dir, c.census_path);
    read_path(doc, "lexicon_path", base_dir, c.lexicon_path);
    c.corpora_paths = read_path_map(doc, "corpora_paths", base_dir);

    read(doc, "cutoff_m", c.cutoff_m);
    read(doc, "radii_m", c.radii_m);
    read(doc, "bin_edges_m", c.bin_edges_m);
    read(doc, "include_unclear", c.include_unclear);
    read(doc, "include_other", c.include_other);
    if (doc.contains("group_level")) {
        c.group_level = level_of(get_as<std::string>(doc["group_level"], "group_level"), "group_level");
    }
    if (doc.contains("density_level")) {
        c.density_level =
            level_of(get_as<std::string>(doc["density_level"], "density_level"), "density_level");
    }
    read(doc, "coverage_keys", c.coverage_keys);
    read(doc, "fit_log_space", c.fit_log_space);
    if (doc.contains("reference_time")) {
        try {
            c.reference_time = parse_iso8601(get_as<std::string>(doc["reference_time"], "reference_time"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("reference_time: ") + e.what());
        }
    }
    read(doc, "workers", c.workers);
    std::string out_dir;
    read(doc, "output_dir", out_dir);
    if (!out_dir.empty()) {
        c.output_dir = resolve(base_dir, out_dir);
    } else {
        c.output_dir = base_dir / "out";
    }

    const auto& f = section(doc, "fetch");
    read(f, "areas", c.fetch.areas);
    if (const auto it = f.find("tags"); it != f.end()) {
        for (const auto& t : get_as<std::vector<std::map<std::string, std::string>>>(*it, "fetch.tags")) {
            if (!t.contains("key") || !t.contains("value")) {
                throw ConfigError("fetch.tags entries need key and value");
            }
            c.fetch.tags.push_back({t.at("key"), t.at("value")});
        }
    }
    read(f, "timeout_s", c.fetch.timeout_s);
    read(f, "retries", c.fetch.retries);
    read(f, "backoff_base_s", c.fetch.backoff_base_s);
    read(f, "workers", c.fetch.workers);

    const auto& e = section(doc, "estimate");
    if (e.contains("category")) {
        c.estimate.category = category_of(get_as<std::string>(e["category"], "estimate.category"),
                                          "estimate.category");
    }
    read(e, "lo_radius_m", c.estimate.lo_radius_m);
    read(e, "hi_radius_m", c.estimate.hi_radius_m);
    read(e, "statewide", c.estimate.statewide);
    if (const auto it = e.find("density_ranges"); it != e.end()) {
        if (!it->is_array()) {
            throw ConfigError("estimate.density_ranges must be an array");
        }
        for (const auto& r : *it) {
            DensityRange d;
            read(r, "region_id", d.region_id);
            read(r, "d_lo", d.d_lo);
            read(r, "d_hi", d.d_hi);
            if (d.region_id.empty()) {
                throw ConfigError("estimate.density_ranges entries need region_id");
            }
            c.estimate.density_ranges.push_back(d);
        }
    }

    const auto& t = section(doc, "text");
    if (t.contains("category")) {
        c.text.category = category_of(get_as<std::string>(t["category"], "text.category"), "text.category");
    }
    read(t, "keys", c.text.keys);
    read(t, "split_at", c.text.split_at);
    read(t, "top_n", c.text.top_n);
    c.text.tagged_paths = read_path_map(t, "tagged_paths", base_dir);

    if (const auto it = doc.find("comparisons"); it != doc.end()) {
        if (!it->is_array()) {
            throw ConfigError("comparisons must be an array");
        }
        for (const auto& cmp : *it) {
            ComparisonConfig cc;
            read(cmp, "label", cc.label);
            cc.snapshot_paths = read_paths(cmp, "snapshot_paths", base_dir);
            if (cc.label.empty() || cc.snapshot_paths.empty()) {
                throw ConfigError("comparisons entries need label and snapshot_paths");
            }
            c.comparisons.push_back(std::move(cc));
        }
    }

    if (c.radii_m.empty()) {
        for (double r = 1.0; r <= c.cutoff_m; r += 1.0) {
            c.radii_m.push_back(r);
        }
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON at byte " + std::to_string(e.byte));
    }
    return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void validate(const RunConfig& c)
{
    if (!c.overpass_endpoint && c.snapshot_paths.empty()) {
        throw ConfigError("either overpass_endpoint or snapshot_paths is required");
    }
    if (c.categories.empty()) {
        throw ConfigError("categories must not be empty");
    }
    if (!(c.cutoff_m > 0.0)) {
        throw ConfigError("cutoff_m must be positive");
    }
    for (std::size_t i = 0; i < c.radii_m.size(); ++i) {
        if (!(c.radii_m[i] > 0.0) || (i > 0 && !(c.radii_m[i] > c.radii_m[i - 1]))) {
            throw ConfigError("radii_m must be positive and strictly ascending");
        }
    }
    if (!c.radii_m.empty() && c.radii_m.back() > c.cutoff_m) {
        throw ConfigError("radii_m must not exceed cutoff_m");
    }
    if (c.bin_edges_m.empty()) {
        throw ConfigError("bin_edges_m must not be empty");
    }
    for (std::size_t i = 1; i < c.bin_edges_m.size(); ++i) {
        if (!(c.bin_edges_m[i] > c.bin_edges_m[i - 1])) {
            throw ConfigError("bin_edges_m must be strictly ascending");
        }
    }
    if (!(c.estimate.lo_radius_m > 0.0) || !(c.estimate.lo_radius_m < c.estimate.hi_radius_m) ||
        c.estimate.hi_radius_m > c.cutoff_m) {
        throw ConfigError("estimate radii need 0 < lo_radius_m < hi_radius_m <= cutoff_m");
    }
    if (c.text.split_at < 1) {
        throw ConfigError("text.split_at must be >= 1");
    }
    if (c.fetch.retries < 0 || c.fetch.timeout_s <= 0 || c.fetch.workers == 0 ||
        c.fetch.backoff_base_s < 0.0) {
        throw ConfigError("fetch settings out of range");
    }
}

unsigned effective_workers(const RunConfig& config)
{
    if (config.workers > 0) {
        return config.workers;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace vgiq
