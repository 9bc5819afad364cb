#include "vgiq/metrics.hpp"

#include "vgiq/geo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace vgiq::metrics {

RegionAssignment assign_to_regions(std::span<const OsmElement> elements,
                                   std::span<const Region> regions)
{
    std::map<std::string, std::vector<OsmElement>> by_id;
    for (const auto& r : regions) {
        by_id[r.region_id];
    }
    RegionAssignment out;
    for (const auto& e : elements) {
        if (!e.is_node()) {
            continue;
        }
        const GeoPoint p{e.lat, e.lon};
        bool assigned = false;
        for (const auto& r : regions) {
            if (geo::point_in_region(p, r)) {
                by_id[r.region_id].push_back(e);
                assigned = true;
            }
        }
        if (!assigned) {
            out.unassigned.push_back(e);
        }
    }
    for (auto& [id, members] : by_id) {
        out.groups.push_back({id, std::move(members)});
    }
    return out;
}

Grouping single_group(std::span<const OsmElement> elements, std::string group_id)
{
    return {ElementGroup{std::move(group_id), {elements.begin(), elements.end()}}};
}

CooccurrenceMatrix cooccurrence_matrix(std::span<const OsmElement> elements,
                                       std::span<const CrossCategory> cats)
{
    if (cats.empty()) {
        throw std::invalid_argument("cooccurrence_matrix: no categories");
    }
    const std::size_t n = cats.size();
    CooccurrenceMatrix m;
    m.categories.assign(cats.begin(), cats.end());
    m.counts.assign(n, 0);
    m.joint.assign(n, std::vector<std::size_t>(n, 0));

    std::vector<bool> member(n);
    for (const auto& e : elements) {
        const auto set = classify_element(e);
        for (std::size_t a = 0; a < n; ++a) {
            member[a] = set.contains(cats[a]);
        }
        for (std::size_t a = 0; a < n; ++a) {
            if (!member[a]) {
                continue;
            }
            ++m.counts[a];
            for (std::size_t b = 0; b < n; ++b) {
                if (member[b]) {
                    ++m.joint[a][b];
                }
            }
        }
    }

    m.share.assign(n, std::vector<std::optional<double>>(n));
    for (std::size_t a = 0; a < n; ++a) {
        if (m.counts[a] == 0) {
            continue;
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b) {
                m.share[a][b] =
                    static_cast<double>(m.joint[a][b]) / static_cast<double>(m.counts[a]);
            }
        }
    }
    return m;
}

double quantile(std::span<const double> sorted, double q)
{
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of empty data");
    }
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

AgeStats summarize_ages(std::string group_id, std::vector<double> ages_days)
{
    if (ages_days.empty()) {
        throw std::invalid_argument("summarize_ages: no data");
    }
    std::sort(ages_days.begin(), ages_days.end());

    AgeStats s;
    s.group_id = std::move(group_id);
    s.n = ages_days.size();
    s.q1_days = quantile(ages_days, 0.25);
    s.median_days = quantile(ages_days, 0.5);
    s.q3_days = quantile(ages_days, 0.75);

    const double iqr = s.q3_days - s.q1_days;
    const double lo_fence = s.q1_days - 1.5 * iqr;
    const double hi_fence = s.q3_days + 1.5 * iqr;
    const auto lo_it = std::lower_bound(ages_days.begin(), ages_days.end(), lo_fence);
    const auto hi_it = std::upper_bound(ages_days.begin(), ages_days.end(), hi_fence);
    // The box itself always lies inside the fences, so both ends exist.
    s.whisker_lo_days = *lo_it;
    s.whisker_hi_days = *(hi_it - 1);

    std::map<std::int64_t, std::size_t> bins;
    for (double a : ages_days) {
        ++bins[static_cast<std::int64_t>(std::floor(a / age_bin_days))];
    }
    const auto last = bins.rbegin()->first;
    for (std::int64_t b = 0; b <= last; ++b) {
        const auto it = bins.find(b);
        s.histogram.emplace_back(static_cast<double>(b) * age_bin_days,
                                 it == bins.end() ? 0 : it->second);
    }
    return s;
}

AgeReport age_stats(const Grouping& groups, Timestamp reference_time)
{
    AgeReport out;
    for (const auto& g : groups) {
        std::vector<double> ages;
        ages.reserve(g.members.size());
        for (const auto& e : g.members) {
            if (!e.has_meta) {
                out.rejects.push_back({static_cast<std::size_t>(e.id), "no timestamp"});
                continue;
            }
            if (e.timestamp > reference_time) {
                out.rejects.push_back(
                    {static_cast<std::size_t>(e.id), "timestamp after reference time"});
                continue;
            }
            ages.push_back(days_between(e.timestamp, reference_time));
        }
        if (!ages.empty()) {
            out.groups.push_back(summarize_ages(g.group_id, std::move(ages)));
        }
    }
    return out;
}

VersionHistogram version_histogram(std::span<const OsmElement> elements)
{
    VersionHistogram counts{};
    if (elements.empty()) {
        return counts;
    }
    for (const auto& e : elements) {
        const auto bin = static_cast<std::size_t>(std::clamp<std::int64_t>(e.version, 1, 4) - 1);
        counts[bin] += 1.0;
    }
    const auto n = static_cast<double>(elements.size());
    for (auto& c : counts) {
        c /= n;
    }
    return counts;
}

InequalityStat gini(std::span<const std::int64_t> counts)
{
    std::vector<std::int64_t> x(counts.begin(), counts.end());
    if (std::any_of(x.begin(), x.end(), [](auto v) { return v < 0; })) {
        throw std::invalid_argument("gini: negative count");
    }
    std::sort(x.begin(), x.end());
    const auto n = static_cast<std::int64_t>(x.size());
    // sum_ij |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i), i = 1..n ascending;
    // integer arithmetic keeps the numerator exact.
    std::int64_t numerator = 0;
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        numerator += (2 * (i + 1) - n - 1) * x[static_cast<std::size_t>(i)];
        total += x[static_cast<std::size_t>(i)];
    }
    if (total <= 0) {
        throw std::domain_error("gini: all contribution counts are zero");
    }

    InequalityStat s;
    s.n_contributors = x.size();
    s.gini = static_cast<double>(numerator) / (static_cast<double>(n) * static_cast<double>(total));
    s.top_contributor_share = static_cast<double>(x.back()) / static_cast<double>(total);
    return s;
}

std::vector<std::pair<std::int64_t, std::int64_t>>
contributions_by_uid(std::span<const OsmElement> elements)
{
    std::map<std::int64_t, std::int64_t> by_uid;
    for (const auto& e : elements) {
        ++by_uid[e.uid];
    }
    return {by_uid.begin(), by_uid.end()};
}

std::vector<RichnessRow> tag_richness(const Grouping& groups, CrossCategory cat)
{
    const auto def = defining_tag(cat);
    std::vector<RichnessRow> out;
    for (const auto& g : groups) {
        RichnessRow row;
        row.group_id = g.group_id;
        std::map<std::string, std::size_t> key_counts;
        std::size_t total = 0;
        for (const auto& e : g.members) {
            if (!has_category(e, cat)) {
                continue;
            }
            ++row.n;
            total += descriptive_tag_count(e, cat);
            for (const auto& [k, v] : e.tags) {
                if (is_meta_key(k) || (k == def.key && v == def.value)) {
                    continue;
                }
                ++key_counts[k];
            }
        }
        if (row.n > 0) {
            const auto n = static_cast<double>(row.n);
            row.mean_descriptive = static_cast<double>(total) / n;
            for (const auto& [k, c] : key_counts) {
                row.key_frequencies.push_back({k, static_cast<double>(c) / n});
            }
            std::stable_sort(row.key_frequencies.begin(), row.key_frequencies.end(),
                             [](const KeyShare& a, const KeyShare& b) { return a.share > b.share; });
        }
        out.push_back(std::move(row));
    }
    return out;
}

KeyCoverage key_coverage(std::span<const OsmElement> elements, const std::string& key)
{
    KeyCoverage out;
    out.key = key;
    out.n_elements = elements.size();
    std::map<std::string, std::size_t> values;
    std::size_t carrying = 0;
    for (const auto& e : elements) {
        const auto it = e.tags.find(key);
        if (it != e.tags.end()) {
            ++carrying;
            ++values[it->second];
        }
    }
    if (!elements.empty()) {
        out.coverage = static_cast<double>(carrying) / static_cast<double>(elements.size());
    }
    for (const auto& [v, c] : values) {
        out.values.push_back({v, c});
    }
    std::stable_sort(out.values.begin(), out.values.end(),
                     [](const ValueCount& a, const ValueCount& b) { return a.count > b.count; });
    return out;
}

std::vector<OsmElement> filter_category(std::span<const OsmElement> elements, CrossCategory c,
                                        bool nodes_only)
{
    std::vector<OsmElement> out;
    for (const auto& e : elements) {
        if ((!nodes_only || e.is_node()) && has_category(e, c)) {
            out.push_back(e);
        }
    }
    return out;
}

std::vector<OsmElement> filter_any(std::span<const OsmElement> elements,
                                   std::span<const CrossCategory> cats, bool nodes_only)
{
    std::vector<OsmElement> out;
    for (const auto& e : elements) {
        if (nodes_only && !e.is_node()) {
            continue;
        }
        if (std::any_of(cats.begin(), cats.end(), [&](auto c) { return has_category(e, c); })) {
            out.push_back(e);
        }
    }
    return out;
}

} // namespace vgiq::metrics
