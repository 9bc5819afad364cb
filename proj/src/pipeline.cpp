#include "vgiq/pipeline.hpp"

#include "vgiq/estimate.hpp"
#include "vgiq/fitting.hpp"
#include "vgiq/geo.hpp"
#include "vgiq/matching.hpp"
#include "vgiq/metrics.hpp"
#include "vgiq/overpass.hpp"
#include "vgiq/report_writer.hpp"
#include "vgiq/text.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace vgiq {

using nlohmann::json;

namespace {

constexpr const char* tool_version = "0.1.0";

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to index-addressed storage so the merge stays deterministic.
/// The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

json skipped(const std::string& reason)
{
    return {{"status", "skipped"}, {"reason", reason}};
}

json opt_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

CsvCell opt_cell(const std::optional<double>& v)
{
    return v ? CsvCell{*v} : CsvCell{};
}

CsvCell cell(std::size_t v)
{
    return CsvCell{static_cast<std::int64_t>(v)};
}

std::vector<std::string> category_names(std::span<const CrossCategory> cats)
{
    std::vector<std::string> out;
    for (const auto c : cats) {
        out.emplace_back(to_string(c));
    }
    return out;
}

std::vector<Region> regions_at(std::span<const Region> regions, RegionLevel level)
{
    std::vector<Region> out;
    for (const auto& r : regions) {
        if (r.level == level) {
            out.push_back(r);
        }
    }
    return out;
}

struct Inputs {
    ElementSet elements;
    std::vector<std::string> snapshot_names;
    std::vector<Region> regions;
    std::optional<std::vector<ReferenceFeature>> references;
    std::optional<text::Lexicon> lexicon;
    std::map<std::string, text::PosDistribution> corpora;
    std::map<std::string, text::PosDistribution> tagged;  // text key -> distribution
};

class Run {
public:
    Run(const RunConfig& config, const StageSet& stages)
        : config_(config), stages_(stages), workers_(effective_workers(config))
    {
        if (stages_.estimate) {
            stages_.match = true;
        }
    }

    QualityReport execute();

private:
    void check_inputs() const;
    void load();
    ElementSet load_snapshots(std::span<const std::filesystem::path> paths, const std::string& section);
    void diag(std::string section, std::string code, std::string message, std::size_t count)
    {
        if (count > 0) {
            report_.diagnostics.push_back({std::move(section), std::move(code), std::move(message), count});
        }
    }

    json categories_section();
    json contamination_section();
    json metrics_section();
    json comparisons_section();
    json matching_section();
    json fitting_section();
    json estimate_section();
    json text_section();
    json quality_elements(const json& doc) const;

    /// Runs a section body, turning exceptions into a failed section.
    json guarded(const std::string& name, const std::function<json()>& body);

    const RunConfig& config_;
    StageSet stages_;
    unsigned workers_;
    Inputs in_;
    Timestamp reference_time_{};
    QualityReport report_;
    std::optional<matching::MatchOutput> matches_;
    std::vector<std::string> summary_lines_;
};

void Run::check_inputs() const
{
    if (config_.regions_path.empty()) {
        throw ConfigError("regions_path is required");
    }
    if (stages_.strict) {
        if (stages_.match && !config_.references_path) {
            throw ConfigError("match needs references_path");
        }
        if (stages_.text && config_.text.keys.empty()) {
            throw ConfigError("text needs at least one key");
        }
    }
    // Everything named in the config must exist before any network call.
    std::vector<std::filesystem::path> paths = config_.snapshot_paths;
    paths.push_back(config_.regions_path);
    for (const auto* p : {&config_.references_path, &config_.census_path, &config_.lexicon_path}) {
        if (*p) {
            paths.push_back(**p);
        }
    }
    for (const auto& [label, p] : config_.corpora_paths) {
        paths.push_back(p);
    }
    for (const auto& [key, p] : config_.text.tagged_paths) {
        paths.push_back(p);
    }
    for (const auto& cmp : config_.comparisons) {
        paths.insert(paths.end(), cmp.snapshot_paths.begin(), cmp.snapshot_paths.end());
    }
    for (const auto& p : paths) {
        if (!std::filesystem::is_regular_file(p)) {
            throw InputError("input file not found: " + p.string());
        }
    }
}

ElementSet Run::load_snapshots(std::span<const std::filesystem::path> paths, const std::string& section)
{
    std::vector<ElementSet> sets;
    std::size_t rejects = 0;
    std::size_t duplicates = 0;
    for (const auto& p : paths) {
        auto parsed = parse_osm_json(read_file(p), Timestamp{});
        if (parsed.set.snapshot_time == Timestamp{}) {
            diag(section, "snapshot_time_missing", p.filename().string() + " has no osm3s timestamp", 1);
        }
        rejects += parsed.rejects.size();
        duplicates += parsed.duplicates;
        sets.push_back(std::move(parsed.set));
    }
    diag(section, "element_rejects", "snapshot elements rejected while parsing", rejects);
    diag(section, "duplicate_elements", "elements repeated within one snapshot (last wins)", duplicates);
    return merge_element_sets(sets);
}

void Run::load()
{
    if (!config_.snapshot_paths.empty()) {
        in_.elements = load_snapshots(config_.snapshot_paths, "ingest");
        for (const auto& p : config_.snapshot_paths) {
            in_.snapshot_names.push_back(p.filename().string());
        }
    } else {
        std::vector<ElementSet> sets;
        std::size_t rejects = 0;
        for (auto& snap : fetch_snapshots(config_)) {
            auto parsed = parse_osm_json(snap.body, Timestamp{}, SnapshotSource::overpass);
            rejects += parsed.rejects.size();
            sets.push_back(std::move(parsed.set));
            in_.snapshot_names.push_back(snap.file_name);
        }
        diag("ingest", "element_rejects", "fetched elements rejected while parsing", rejects);
        in_.elements = merge_element_sets(sets);
    }
    reference_time_ = config_.reference_time.value_or(in_.elements.snapshot_time);

    auto regions = parse_geojson_regions(read_file(config_.regions_path));
    diag("ingest", "region_rejects", "region features rejected", regions.rejects.size());
    in_.regions = std::move(regions.items);
    if (config_.census_path) {
        const auto census = parse_census_csv(read_file(*config_.census_path));
        diag("ingest", "census_rejects", "census rows rejected", census.rejects.size());
        attach_census(in_.regions, census);
    }
    if (config_.references_path) {
        auto refs = parse_reference_features(read_file(*config_.references_path));
        diag("ingest", "reference_rejects", "reference features rejected", refs.rejects.size());
        in_.references = std::move(refs.items);
    }
    if (config_.lexicon_path) {
        auto lex = text::parse_lexicon_csv(read_file(*config_.lexicon_path));
        diag("ingest", "lexicon_rejects", "lexicon lines rejected", lex.rejects.size());
        in_.lexicon = std::move(lex.lexicon);
    }
    auto load_pos = [&](const std::filesystem::path& p, const std::string& label) {
        auto parsed = text::pos_distribution_from_file(read_file(p), label);
        diag("ingest", "tagged_token_rejects", "tagged-token lines rejected in " + p.filename().string(),
             parsed.rejects.size());
        return std::move(parsed.distribution);
    };
    for (const auto& [label, p] : config_.corpora_paths) {
        in_.corpora.emplace(label, load_pos(p, label));
    }
    for (const auto& [key, p] : config_.text.tagged_paths) {
        in_.tagged.emplace(key, load_pos(p, key));
    }
}

json Run::guarded(const std::string& name, const std::function<json()>& body)
{
    try {
        return body();
    } catch (const std::exception& e) {
        diag(name, "section_failed", e.what(), 1);
        return {{"status", "failed"}, {"reason", e.what()}};
    }
}

// ---------------------------------------------------------------------------

json Run::categories_section()
{
    json per = json::object();
    std::size_t total = 0;
    std::size_t non_nodes = 0;
    std::set<std::pair<int, std::int64_t>> seen;
    for (const auto c : config_.categories) {
        std::size_t counts[3] = {0, 0, 0};
        for (const auto& e : in_.elements.elements) {
            if (has_category(e, c)) {
                ++counts[static_cast<int>(e.kind)];
            }
        }
        const std::size_t all = counts[0] + counts[1] + counts[2];
        per[std::string(to_string(c))] = {
            {"nodes", counts[0]},
            {"ways", counts[1]},
            {"relations", counts[2]},
            {"non_node_share", all ? json(double(counts[1] + counts[2]) / double(all)) : json(nullptr)}};
    }
    const std::vector<CrossCategory> cats = config_.categories;
    for (const auto& e : in_.elements.elements) {
        const auto set = classify_element(e);
        if (std::any_of(cats.begin(), cats.end(), [&](auto c) { return set.contains(c); })) {
            ++total;
            if (!e.is_node()) {
                ++non_nodes;
            }
        }
    }
    CsvTable t{"category_counts", {"category", "nodes", "ways", "relations", "non_node_share"}, {}};
    for (const auto& [name, v] : per.items()) {
        t.rows.push_back({name, cell(v["nodes"].get<std::size_t>()), cell(v["ways"].get<std::size_t>()),
                          cell(v["relations"].get<std::size_t>()),
                          v["non_node_share"].is_null() ? CsvCell{} : CsvCell{v["non_node_share"].get<double>()}});
    }
    report_.tables.push_back(std::move(t));
    return {{"status", "ok"},
            {"per_category", per},
            {"global", {{"elements", total},
                        {"non_nodes", non_nodes},
                        {"non_node_share", total ? json(double(non_nodes) / double(total)) : json(nullptr)}}}};
}

json matrix_json(const metrics::CooccurrenceMatrix& m)
{
    json share = json::array();
    for (const auto& row : m.share) {
        json r = json::array();
        for (const auto& v : row) {
            r.push_back(opt_number(v));
        }
        share.push_back(r);
    }
    return {{"categories", category_names(m.categories)}, {"counts", m.counts}, {"joint", m.joint}, {"share", share}};
}

json Run::contamination_section()
{
    const auto& all = in_.elements.elements;
    const auto nodes = metrics::filter_any(all, config_.categories, true);
    const auto m_all = metrics::cooccurrence_matrix(all, config_.categories);
    const auto m_nodes = metrics::cooccurrence_matrix(nodes, config_.categories);

    CsvTable t{"contamination", {"scope", "category", "count"}, {}};
    for (const auto c : config_.categories) {
        t.header.emplace_back(to_string(c));
    }
    auto add = [&](const std::string& scope, const metrics::CooccurrenceMatrix& m) {
        for (std::size_t i = 0; i < m.categories.size(); ++i) {
            std::vector<CsvCell> row{scope, std::string(to_string(m.categories[i])), cell(m.counts[i])};
            for (const auto& v : m.share[i]) {
                row.push_back(opt_cell(v));
            }
            t.rows.push_back(std::move(row));
        }
    };
    add("all_elements", m_all);
    add("nodes", m_nodes);
    report_.tables.push_back(std::move(t));
    return {{"status", "ok"}, {"all_elements", matrix_json(m_all)}, {"nodes", matrix_json(m_nodes)}};
}

struct GroupMetrics {
    json doc;
    std::optional<metrics::AgeStats> age;
    metrics::VersionHistogram versions{};
    std::optional<metrics::InequalityStat> contributors;
    std::optional<metrics::RichnessRow> richness;
    std::vector<metrics::KeyCoverage> coverage;
    std::size_t age_rejects = 0;
};

GroupMetrics group_metrics(const metrics::ElementGroup& g, CrossCategory cat, Timestamp ref,
                           std::span<const std::string> coverage_keys)
{
    GroupMetrics out;
    const metrics::Grouping one{g};
    const auto ages = metrics::age_stats(one, ref);
    out.age_rejects = ages.rejects.size();
    if (!ages.groups.empty()) {
        out.age = ages.groups.front();
    }
    out.versions = metrics::version_histogram(g.members);
    std::vector<std::int64_t> counts;
    for (const auto& [uid, n] : metrics::contributions_by_uid(g.members)) {
        counts.push_back(n);
    }
    if (!counts.empty()) {
        out.contributors = metrics::gini(counts);
    }
    const auto rich = metrics::tag_richness(one, cat);
    if (!rich.empty()) {
        out.richness = rich.front();
    }
    for (const auto& key : coverage_keys) {
        out.coverage.push_back(metrics::key_coverage(g.members, key));
    }

    json age = nullptr;
    if (out.age) {
        const auto& a = *out.age;
        age = {{"n", a.n},
               {"q1_days", a.q1_days},
               {"median_days", a.median_days},
               {"q3_days", a.q3_days},
               {"whisker_lo_days", a.whisker_lo_days},
               {"whisker_hi_days", a.whisker_hi_days}};
    }
    json contrib = nullptr;
    if (out.contributors) {
        contrib = {{"gini", out.contributors->gini},
                   {"n_contributors", out.contributors->n_contributors},
                   {"top_contributor_share", out.contributors->top_contributor_share}};
    }
    json richness = nullptr;
    if (out.richness) {
        json freqs = json::array();
        for (const auto& k : out.richness->key_frequencies) {
            freqs.push_back({{"key", k.key}, {"share", k.share}});
        }
        richness = {{"mean_descriptive_tags", opt_number(out.richness->mean_descriptive)},
                    {"key_frequencies", freqs}};
    }
    json coverage = json::object();
    for (const auto& kc : out.coverage) {
        json values = json::array();
        for (const auto& v : kc.values) {
            values.push_back({{"value", v.value}, {"count", v.count}});
        }
        coverage[kc.key] = {{"coverage", kc.coverage}, {"values", values}};
    }
    out.doc = {{"group_id", g.group_id},
               {"n_nodes", g.members.size()},
               {"age", age},
               {"versions", {{"v1", out.versions[0]}, {"v2", out.versions[1]},
                             {"v3", out.versions[2]}, {"v4_plus", out.versions[3]}}},
               {"contributors", contrib},
               {"richness", richness},
               {"coverage", coverage}};
    return out;
}

json Run::metrics_section()
{
    const auto cat = config_.analysis_category;
    const auto nodes = metrics::filter_category(in_.elements.elements, cat, true);
    const auto level_regions = regions_at(in_.regions, config_.group_level);
    if (level_regions.empty()) {
        diag("metrics", "no_regions_at_level",
             "no regions at level " + std::string(to_string(config_.group_level)), 1);
    }
    auto assignment = metrics::assign_to_regions(nodes, level_regions);
    diag("metrics", "unassigned_nodes", "analysis nodes inside no region", assignment.unassigned.size());

    metrics::Grouping groups = std::move(assignment.groups);
    groups.push_back({"all", nodes});
    std::vector<GroupMetrics> results(groups.size());
    parallel_for(groups.size(), workers_, [&](std::size_t i) {
        results[i] = group_metrics(groups[i], cat, reference_time_, config_.coverage_keys);
    });

    CsvTable age{"age_stats", {"group_id", "n", "q1_days", "median_days", "q3_days", "whisker_lo_days", "whisker_hi_days"}, {}};
    CsvTable hist{"age_histogram", {"group_id", "bin_start_days", "count"}, {}};
    CsvTable ver{"version_histogram", {"group_id", "n", "v1", "v2", "v3", "v4_plus"}, {}};
    CsvTable con{"contributors", {"group_id", "n_nodes", "n_contributors", "gini", "top_contributor_share"}, {}};
    CsvTable rich{"richness", {"group_id", "n", "mean_descriptive_tags"}, {}};
    CsvTable keys{"key_frequencies", {"group_id", "key", "share"}, {}};
    CsvTable cov{"key_coverage", {"group_id", "key", "coverage", "value", "count"}, {}};

    json regions = json::array();
    json overall;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const auto& r = results[i];
        if (r.age) {
            const auto& a = *r.age;
            age.rows.push_back({g.group_id, cell(a.n), a.q1_days, a.median_days, a.q3_days, a.whisker_lo_days,
                                a.whisker_hi_days});
            for (const auto& [start, count] : a.histogram) {
                hist.rows.push_back({g.group_id, start, cell(count)});
            }
        }
        ver.rows.push_back({g.group_id, cell(g.members.size()), r.versions[0], r.versions[1], r.versions[2],
                            r.versions[3]});
        if (r.contributors) {
            con.rows.push_back({g.group_id, cell(g.members.size()), cell(r.contributors->n_contributors),
                                r.contributors->gini, r.contributors->top_contributor_share});
        }
        if (r.richness) {
            rich.rows.push_back({g.group_id, cell(r.richness->n), opt_cell(r.richness->mean_descriptive)});
            for (const auto& k : r.richness->key_frequencies) {
                keys.rows.push_back({g.group_id, k.key, k.share});
            }
        }
        for (const auto& kc : r.coverage) {
            if (kc.values.empty()) {
                cov.rows.push_back({g.group_id, kc.key, kc.coverage, CsvCell{}, CsvCell{}});
            }
            for (const auto& v : kc.values) {
                cov.rows.push_back({g.group_id, kc.key, kc.coverage, v.value, cell(v.count)});
            }
        }
        if (i + 1 == groups.size()) {
            overall = r.doc;
        } else {
            regions.push_back(r.doc);
        }
    }
    // The overall group holds every analysis node exactly once.
    diag("metrics", "age_rejects", "analysis nodes without timestamp or dated after the reference time",
         results.back().age_rejects);
    for (auto* t : {&age, &hist, &ver, &con, &rich, &keys, &cov}) {
        report_.tables.push_back(std::move(*t));
    }
    return {{"status", "ok"},
            {"category", std::string(to_string(cat))},
            {"group_level", std::string(to_string(config_.group_level))},
            {"reference_time", format_iso8601(reference_time_)},
            {"unassigned_nodes", assignment.unassigned.size()},
            {"regions", regions},
            {"overall", overall}};
}

json Run::comparisons_section()
{
    if (config_.comparisons.empty()) {
        return skipped("no comparison snapshots configured");
    }
    const auto level_regions = regions_at(in_.regions, config_.group_level);
    json list = json::array();
    CsvTable t{"comparisons", {"label", "group_id", "n_nodes", "v1_share", "gini", "median_age_days"}, {}};
    auto add_row = [&](const std::string& label, const metrics::ElementGroup& g) {
        const auto versions = metrics::version_histogram(g.members);
        std::vector<std::int64_t> counts;
        for (const auto& [uid, n] : metrics::contributions_by_uid(g.members)) {
            counts.push_back(n);
        }
        std::optional<double> gini;
        if (!counts.empty()) {
            gini = metrics::gini(counts).gini;
        }
        const auto ages = metrics::age_stats(metrics::Grouping{g}, reference_time_);
        std::optional<double> median;
        if (!ages.groups.empty()) {
            median = ages.groups.front().median_days;
        }
        t.rows.push_back({label, g.group_id, cell(g.members.size()), versions[0], opt_cell(gini), opt_cell(median)});
        return json{{"group_id", g.group_id},
                    {"n_nodes", g.members.size()},
                    {"v1_share", versions[0]},
                    {"gini", opt_number(gini)},
                    {"median_age_days", opt_number(median)}};
    };
    auto side = [&](const std::string& label, const std::vector<OsmElement>& nodes) {
        auto assignment = metrics::assign_to_regions(nodes, level_regions);
        json groups = json::array();
        for (const auto& g : assignment.groups) {
            groups.push_back(add_row(label, g));
        }
        groups.push_back(add_row(label, {"all", nodes}));
        return json{{"label", label}, {"groups", groups}};
    };
    list.push_back(side(std::string(to_string(config_.analysis_category)),
                        metrics::filter_category(in_.elements.elements, config_.analysis_category, true)));
    for (const auto& cmp : config_.comparisons) {
        const auto set = load_snapshots(cmp.snapshot_paths, "comparisons");
        std::vector<OsmElement> nodes;
        for (const auto& e : set.elements) {
            if (e.is_node()) {
                nodes.push_back(e);
            }
        }
        list.push_back(side(cmp.label, nodes));
    }
    report_.tables.push_back(std::move(t));
    return {{"status", "ok"}, {"series", list}};
}

// ---------------------------------------------------------------------------

json Run::matching_section()
{
    if (!in_.references) {
        return skipped("no references_path configured");
    }
    matching::MatchOptions opts;
    opts.cutoff_m = config_.cutoff_m;
    opts.include_unclear = config_.include_unclear;
    opts.include_other = config_.include_other;
    std::erase_if(opts.categories, [&](CrossCategory c) {
        return std::find(config_.categories.begin(), config_.categories.end(), c) == config_.categories.end();
    });
    opts.workers = workers_;
    const auto level_regions = regions_at(in_.regions, config_.group_level);
    matches_ = matching::match_references(*in_.references, in_.elements.elements, level_regions, opts);
    const auto& m = *matches_;

    const auto curve = matching::matching_curve(m.results, config_.radii_m);
    const auto bins = matching::bin_table(m.results, config_.bin_edges_m);

    CsvTable matches{"matches", {"ref_id", "matched", "node_id", "distance_m", "region_id"}, {}};
    for (const auto& r : m.results) {
        matches.rows.push_back({r.ref_id, std::int64_t{r.matched ? 1 : 0},
                                r.node_id ? CsvCell{*r.node_id} : CsvCell{}, opt_cell(r.distance_m),
                                r.region_id ? CsvCell{*r.region_id} : CsvCell{}});
    }
    CsvTable curve_t{"match_curve", {"radius_m", "cumulative_fraction"}, {}};
    for (std::size_t i = 0; i < curve.radii_m.size(); ++i) {
        curve_t.rows.push_back({curve.radii_m[i], curve.cumulative_fraction[i]});
    }
    json bin_list = json::array();
    CsvTable bins_t{"match_bins", {"group_id", "bin", "lower_m", "upper_m", "share"}, {}};
    auto add_bins = [&](const std::string& group, const std::vector<double>& shares) {
        json out = json::array();
        for (std::size_t i = 0; i < shares.size(); ++i) {
            const double lo = i == 0 ? 0.0 : config_.bin_edges_m[i - 1];
            const std::optional<double> hi =
                i < config_.bin_edges_m.size() ? std::optional<double>(config_.bin_edges_m[i]) : std::nullopt;
            bins_t.rows.push_back({group, cell(i), lo, opt_cell(hi), shares[i]});
            out.push_back({{"lower_m", lo}, {"upper_m", opt_number(hi)}, {"share", shares[i]}});
        }
        return out;
    };
    bin_list = add_bins("all", bins);

    json by_region = json::array();
    for (const auto& [region, results] : matching::results_by_region(m.results)) {
        const auto shares = matching::bin_table(results, config_.bin_edges_m);
        std::size_t matched = 0;
        for (const auto& r : results) {
            matched += r.matched ? 1 : 0;
        }
        by_region.push_back({{"region_id", region},
                             {"n_references", results.size()},
                             {"n_matched", matched},
                             {"bins", add_bins(region, shares)}});
    }
    std::size_t matched = 0;
    for (const auto& r : m.results) {
        matched += r.matched ? 1 : 0;
    }
    std::size_t no_region = 0;
    for (const auto& r : m.results) {
        no_region += r.region_id ? 0 : 1;
    }
    report_.tables.push_back(std::move(matches));
    report_.tables.push_back(std::move(curve_t));
    report_.tables.push_back(std::move(bins_t));
    return {{"status", "ok"},
            {"cutoff_m", config_.cutoff_m},
            {"candidate_categories", category_names(opts.categories)},
            {"candidate_nodes", m.candidate_nodes},
            {"n_references", m.results.size()},
            {"n_matched", matched},
            {"skipped_no_location", m.skipped_no_location},
            {"skipped_by_class", m.skipped_by_class},
            {"degenerate_centroids", m.degenerate_centroids},
            {"references_outside_regions", no_region},
            {"curve", {{"radii_m", curve.radii_m}, {"cumulative_fraction", curve.cumulative_fraction}}},
            {"bins", bin_list},
            {"by_region", by_region}};
}

json logistic_json(const fitting::FitResult& fit)
{
    const auto rise = fitting::rise_interval(fit.params);
    return {{"params", {{"amplitude", fit.params.amplitude},
                        {"steepness", fit.params.steepness},
                        {"midpoint", fit.params.midpoint},
                        {"baseline", fit.params.baseline}}},
            {"rmse", fit.rmse},
            {"n_iter", fit.n_iter},
            {"converged", fit.converged},
            {"degenerate", fit.degenerate},
            {"rise_interval_pct", rise ? json::array({rise->first, rise->second}) : json(nullptr)}};
}

json Run::fitting_section()
{
    const auto level_regions = regions_at(in_.regions, config_.density_level);
    const bool any_census = std::any_of(level_regions.begin(), level_regions.end(),
                                        [](const Region& r) { return r.census.has_value(); });
    if (!any_census) {
        return skipped("no census data for regions at level " + std::string(to_string(config_.density_level)));
    }
    struct Series {
        std::string label;
        std::vector<CrossCategory> cats;
    };
    const std::vector<Series> series{{std::string(to_string(config_.analysis_category)), {config_.analysis_category}},
                                     {"all", config_.categories}};
    json fits = json::array();
    CsvTable curve{"fit_curve", {"label", "catholic_share_pct", "density"}, {}};
    CsvTable dens_all{"densities_all", {"region_id", "count", "density", "catholic_share_pct"}, {}};
    CsvTable dens{"densities", {"region_id", "count", "density", "catholic_share_pct"}, {}};
    for (const auto& s : series) {
        const auto table = fitting::densities_by_region(in_.elements.elements, level_regions, s.cats);
        auto& csv = s.label == "all" ? dens_all : dens;
        json rows = json::array();
        for (const auto& r : table.rows) {
            csv.rows.push_back({r.region_id, cell(r.count), r.density, r.catholic_share_pct});
            rows.push_back({{"region_id", r.region_id}, {"count", r.count}, {"density", r.density},
                            {"catholic_share_pct", r.catholic_share_pct}});
        }
        diag("fitting", "unassigned_nodes", "nodes of series " + s.label + " inside no density region",
             table.unassigned_nodes);
        json entry = {{"label", s.label},
                      {"categories", category_names(s.cats)},
                      {"densities", rows},
                      {"excluded_no_census", table.excluded_no_census},
                      {"unassigned_nodes", table.unassigned_nodes}};
        const auto points = fitting::to_points(table);
        try {
            fitting::FitOptions opts;
            opts.log_space = config_.fit_log_space;
            const auto fit = fitting::fit_logistic(points, opts);
            entry["fit"] = logistic_json(fit);
            for (int x = 0; x <= 100; ++x) {
                curve.rows.push_back({s.label, double(x), fitting::logistic(double(x), fit.params)});
            }
        } catch (const std::invalid_argument& e) {
            entry["fit"] = skipped(e.what());
        }
        fits.push_back(std::move(entry));
    }
    report_.tables.push_back(std::move(dens));
    report_.tables.push_back(std::move(dens_all));
    report_.tables.push_back(std::move(curve));
    return {{"status", "ok"},
            {"density_level", std::string(to_string(config_.density_level))},
            {"log_space", config_.fit_log_space},
            {"series", fits}};
}

json range_json(const estimate::CountRange& r)
{
    return {{"low", r.low},
            {"high", r.high},
            {"low_rounded", estimate::round_significant(r.low)},
            {"high_rounded", estimate::round_significant(r.high)},
            {"method", std::string(estimate::to_string(r.method))}};
}

json Run::estimate_section()
{
    const auto& cfg = config_.estimate;
    if (!matches_ && cfg.density_ranges.empty()) {
        return skipped("needs matching results or density ranges");
    }
    CsvTable t{"estimates", {"scope", "region_id", "method", "mapped", "low", "high"}, {}};
    json doc = {{"status", "ok"},
                {"category", std::string(to_string(cfg.category))},
                {"lo_radius_m", cfg.lo_radius_m},
                {"hi_radius_m", cfg.hi_radius_m}};

    const auto nodes = metrics::filter_category(in_.elements.elements, cfg.category, true);
    const auto level_regions = regions_at(in_.regions, config_.group_level);
    if (!matches_) {
        doc["efficiency"] = skipped("matching unavailable");
    } else {
        const auto assignment = metrics::assign_to_regions(nodes, level_regions);
        const std::vector<double> radii{cfg.lo_radius_m, cfg.hi_radius_m};
        std::map<std::string, std::pair<double, double>> eff;  // region -> (lo, hi)
        for (const auto& [region, results] : matching::results_by_region(matches_->results)) {
            const auto c = matching::matching_curve(results, radii);
            eff[region] = {c.cumulative_fraction[0], c.cumulative_fraction[1]};
        }
        std::vector<estimate::DistrictInput> inputs;
        for (const auto& g : assignment.groups) {
            const auto it = eff.find(g.group_id);
            inputs.push_back({g.group_id, double(g.members.size()),
                              it == eff.end() ? 0.0 : it->second.second,
                              it == eff.end() ? 0.0 : it->second.first});
        }
        const auto agg = estimate::aggregate_by_district(inputs);
        json districts = json::array();
        for (const auto& d : agg.districts) {
            const auto in = std::find_if(inputs.begin(), inputs.end(),
                                         [&](const auto& x) { return x.region_id == d.region_id; });
            districts.push_back({{"region_id", d.region_id},
                                 {"mapped", in->mapped},
                                 {"eff_lo_radius", in->eff_lo_radius},
                                 {"eff_hi_radius", in->eff_hi_radius},
                                 {"range", range_json(d.range)}});
            t.rows.push_back({"district", d.region_id, "efficiency", in->mapped, d.range.low, d.range.high});
        }
        json eff_doc = {{"districts", districts}, {"skipped_districts", agg.skipped}};
        if (!agg.districts.empty()) {
            eff_doc["total"] = range_json(agg.total);
            t.rows.push_back({"total", "all", "efficiency", CsvCell{}, agg.total.low, agg.total.high});
            summary_lines_.push_back("estimated " + std::string(to_string(cfg.category)) + " total: " +
                                     format_number(estimate::round_significant(agg.total.low)) + " to " +
                                     format_number(estimate::round_significant(agg.total.high)) +
                                     " (district efficiencies)");
        } else {
            eff_doc["total"] = nullptr;
        }
        if (cfg.statewide) {
            const auto c = matching::matching_curve(matches_->results, radii);
            try {
                const auto r = estimate::from_efficiency(double(nodes.size()), c.cumulative_fraction[1],
                                                         c.cumulative_fraction[0]);
                eff_doc["statewide"] = range_json(r);
                t.rows.push_back({"statewide", "all", "efficiency", cell(nodes.size()), r.low, r.high});
            } catch (const std::exception& e) {
                eff_doc["statewide"] = skipped(e.what());
            }
        }
        doc["efficiency"] = eff_doc;
    }

    json dens = json::array();
    for (const auto& dr : cfg.density_ranges) {
        const auto it = std::find_if(in_.regions.begin(), in_.regions.end(),
                                     [&](const Region& r) { return r.region_id == dr.region_id; });
        if (it == in_.regions.end()) {
            diag("estimate", "unknown_region", "density range for unknown region " + dr.region_id, 1);
            continue;
        }
        const auto r = estimate::from_density(dr.d_lo, dr.d_hi, it->area_km2);
        dens.push_back({{"region_id", dr.region_id}, {"d_lo", dr.d_lo}, {"d_hi", dr.d_hi},
                        {"area_km2", it->area_km2}, {"range", range_json(r)}});
        t.rows.push_back({"region", dr.region_id, "density", CsvCell{}, r.low, r.high});
        summary_lines_.push_back("density range for " + dr.region_id + ": " +
                                 format_number(estimate::round_significant(r.low)) + " to " +
                                 format_number(estimate::round_significant(r.high)));
    }
    doc["density"] = dens;
    report_.tables.push_back(std::move(t));
    return doc;
}

json Run::text_section()
{
    if (!stages_.strict && !in_.lexicon && in_.corpora.empty() && in_.tagged.empty()) {
        return skipped("no lexicon, corpora or tagged-token files configured");
    }
    const auto nodes = metrics::filter_category(in_.elements.elements, config_.text.category, true);
    const text::Lexicon empty_lexicon;
    const auto& lexicon = in_.lexicon ? *in_.lexicon : empty_lexicon;

    CsvTable lemmas{"lemmas", {"key", "rank", "lemma", "count"}, {}};
    CsvTable lengths{"length_classes", {"key", "length", "share"}, {}};
    CsvTable pos{"pos_distributions", {"label", "pos", "freq"}, {}};
    CsvTable dist{"pos_distances", {"label_a", "label_b", "distance"}, {}};

    struct KeyResult {
        text::TextSelection sel;
        text::LengthClasses lengths;
        std::vector<text::LemmaCount> lemmas;
    };
    const auto& keys = config_.text.keys;
    std::vector<KeyResult> results(keys.size());
    parallel_for(keys.size(), workers_, [&](std::size_t i) {
        auto& r = results[i];
        r.sel = text::select_values(nodes, keys[i]);
        r.lengths = text::length_classes(r.sel.values, config_.text.split_at);
        r.lemmas = text::lemma_frequencies(r.sel.values, lexicon);
    });

    json per_key = json::object();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& key = keys[i];
        const auto& r = results[i];
        json hist = json::array();
        for (const auto& [len, share] : r.lengths.histogram) {
            hist.push_back({len, share});
            lengths.rows.push_back({key, cell(len), share});
        }
        json top = json::array();
        for (std::size_t k = 0; k < r.lemmas.size() && k < config_.text.top_n; ++k) {
            top.push_back({{"lemma", r.lemmas[k].lemma}, {"count", r.lemmas[k].count}});
            lemmas.rows.push_back({key, cell(k + 1), r.lemmas[k].lemma, cell(r.lemmas[k].count)});
        }
        json entry = {{"n_values", r.sel.values.size()},
                      {"excluded", {{"overlong", r.sel.overlong_excluded},
                                    {"suffix_keys", r.sel.suffix_key_values},
                                    {"missing", r.sel.missing}}},
                      {"length_classes", {{"split_at", config_.text.split_at},
                                          {"short_share", r.lengths.short_share},
                                          {"long_share", r.lengths.long_share},
                                          {"histogram", hist}}},
                      {"top_lemmas", top}};
        if (const auto it = in_.tagged.find(key); it != in_.tagged.end()) {
            entry["pos_distribution"] = it->second.freq;
            json d = json::object();
            for (const auto& [label, corpus] : in_.corpora) {
                const double v = text::pos_distance(it->second, corpus);
                d[label] = v;
                dist.rows.push_back({key, label, v});
            }
            entry["pos_distance"] = d;
        } else {
            entry["pos_distribution"] = nullptr;
            entry["pos_distance"] = nullptr;
        }
        per_key[key] = std::move(entry);
    }
    for (const auto& [label, d] : in_.tagged) {
        for (const auto& [tag, f] : d.freq) {
            pos.rows.push_back({label, tag, f});
        }
    }
    json corpora = json::object();
    for (const auto& [label, d] : in_.corpora) {
        for (const auto& [tag, f] : d.freq) {
            pos.rows.push_back({label, tag, f});
        }
        corpora[label] = d.freq;
    }
    json corpus_dist = json::array();
    for (auto a = in_.corpora.begin(); a != in_.corpora.end(); ++a) {
        for (auto b = std::next(a); b != in_.corpora.end(); ++b) {
            const double v = text::pos_distance(a->second, b->second);
            corpus_dist.push_back({{"a", a->first}, {"b", b->first}, {"distance", v}});
            dist.rows.push_back({a->first, b->first, v});
        }
    }
    for (auto* t : {&lemmas, &lengths, &pos, &dist}) {
        report_.tables.push_back(std::move(*t));
    }
    return {{"status", "ok"},
            {"category", std::string(to_string(config_.text.category))},
            {"lexicon", in_.lexicon.has_value()},
            {"keys", per_key},
            {"corpora", corpora},
            {"corpus_distances", corpus_dist}};
}

json Run::quality_elements(const json& doc) const
{
    const std::vector<std::pair<std::string, std::vector<std::string>>> map{
        {"completeness", {"matching", "estimate"}},
        {"logical_consistency", {"categories", "contamination"}},
        {"positional_accuracy", {"matching"}},
        {"temporal_accuracy", {"metrics"}},
        {"thematic_accuracy", {"metrics", "text"}},
        {"usability", {"metrics", "fitting", "comparisons"}}};
    json out = json::object();
    for (const auto& [element, sections] : map) {
        json available = json::array();
        for (const auto& s : sections) {
            if (doc.contains(s) && doc[s].value("status", "") == "ok") {
                available.push_back(s);
            }
        }
        out[element] = {{"sections", sections}, {"available", available}};
    }
    return out;
}

QualityReport Run::execute()
{
    check_inputs();
    load();

    json doc;
    doc["schema_version"] = report_schema_version;
    doc["tool"] = {{"name", "vgiq"}, {"version", tool_version}};
    doc["snapshot_time"] = format_iso8601(in_.elements.snapshot_time);
    doc["reference_time"] = format_iso8601(reference_time_);
    std::size_t n_refs = in_.references ? in_.references->size() : 0;
    doc["inputs"] = {{"snapshots", in_.snapshot_names},
                     {"source", in_.elements.source == SnapshotSource::overpass ? "overpass" : "file"},
                     {"n_elements", in_.elements.elements.size()},
                     {"n_regions", in_.regions.size()},
                     {"n_references", n_refs},
                     {"categories", category_names(config_.categories)}};

    const std::string not_requested = "not requested";
    doc["categories"] = guarded("categories", [&] { return categories_section(); });
    doc["contamination"] = stages_.analyze ? guarded("contamination", [&] { return contamination_section(); })
                                           : skipped(not_requested);
    doc["metrics"] = stages_.analyze ? guarded("metrics", [&] { return metrics_section(); }) : skipped(not_requested);
    doc["comparisons"] = stages_.analyze ? guarded("comparisons", [&] { return comparisons_section(); })
                                         : skipped(not_requested);
    doc["matching"] = stages_.match ? guarded("matching", [&] { return matching_section(); }) : skipped(not_requested);
    doc["fitting"] = stages_.fit ? guarded("fitting", [&] { return fitting_section(); }) : skipped(not_requested);
    doc["estimate"] = stages_.estimate ? guarded("estimate", [&] { return estimate_section(); })
                                       : skipped(not_requested);
    doc["text"] = stages_.text ? guarded("text", [&] { return text_section(); }) : skipped(not_requested);
    doc["quality_elements"] = quality_elements(doc);

    json diags = json::array();
    for (const auto& d : report_.diagnostics) {
        diags.push_back({{"section", d.section}, {"code", d.code}, {"count", d.count}});
    }
    doc["diagnostics"] = diags;
    report_.document = std::move(doc);

    std::string summary = "vgiq report, snapshot " + format_iso8601(in_.elements.snapshot_time) + "\n";
    for (const auto& line : summary_lines_) {
        summary += line + "\n";
    }
    if (!report_.diagnostics.empty()) {
        summary += std::to_string(report_.diagnostics.size()) + " diagnostic(s), see diagnostics.json\n";
    }
    report_.summary = summary;
    return std::move(report_);
}

std::string sanitize(std::string s)
{
    for (auto& c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
        if (!ok) {
            c = '_';
        }
    }
    return s;
}

} // namespace

QualityReport run_pipeline(const RunConfig& config, const StageSet& stages)
{
    validate(config);
    return Run(config, stages).execute();
}

std::vector<FetchedSnapshot> fetch_snapshots(const RunConfig& config)
{
    if (!config.overpass_endpoint) {
        throw ConfigError("fetch needs overpass_endpoint");
    }
    if (config.fetch.areas.empty()) {
        throw ConfigError("fetch needs fetch.areas");
    }
    std::vector<TagFilter> tags = config.fetch.tags;
    if (tags.empty()) {
        for (const auto c : config.categories) {
            const auto t = defining_tag(c);
            tags.push_back({std::string(t.key), std::string(t.value)});
        }
    }
    std::vector<overpass::FetchJob> jobs;
    for (const auto& area : config.fetch.areas) {
        for (const auto& t : tags) {
            jobs.push_back({sanitize(area) + "_" + sanitize(t.key + "=" + t.value),
                            overpass::build_query(t.key, t.value, area, config.fetch.timeout_s)});
        }
    }
    overpass::FetchOptions opts;
    opts.retries = config.fetch.retries;
    opts.backoff_base = std::chrono::milliseconds(static_cast<std::int64_t>(config.fetch.backoff_base_s * 1000.0));
    opts.read_timeout = std::chrono::seconds(config.fetch.timeout_s + 30);
    auto results = overpass::fetch_all(*config.overpass_endpoint, jobs, opts, config.fetch.workers);
    std::vector<FetchedSnapshot> out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& r = results[i];
        out.push_back({"snapshot_" + jobs[i].label + ".json", jobs[i].label, std::move(r.body),
                       r.parsed.set.elements.size(), r.parsed.rejects.size(), r.attempts});
    }
    return out;
}

} // namespace vgiq
