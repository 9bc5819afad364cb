#pragma once

#include "vgiq/config.hpp"
#include "vgiq/ingest.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace vgiq {

/// Report sections a run can compute. Sections left out are marked
/// skipped ("not requested") in the report.
struct StageSet {
    bool analyze = false;   // category counts, contamination, per-region metrics, comparisons
    bool match = false;
    bool fit = false;
    bool estimate = false;  // implies match
    bool text = false;
    /// When set, a requested stage whose optional input is not configured
    /// is a ConfigError instead of a skipped section.
    bool strict = false;

    static StageSet all() { return {true, true, true, true, true, false}; }
};

/// Anomaly worth a look: rejected input items, nodes outside all regions,
/// failed sections. A non-empty list makes the run "partial".
struct Diagnostic {
    std::string section;
    std::string code;
    std::string message;
    std::size_t count = 0;
};

using CsvCell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;
};

struct QualityReport {
    nlohmann::json document;  // serialized as the JSON report
    std::vector<CsvTable> tables;
    std::vector<Diagnostic> diagnostics;
    std::string summary;      // human-readable, rounded figures
};

/// Loads all inputs named in the config, fetching from the endpoint when
/// no snapshot files are configured, and computes the requested sections.
/// Throws ConfigError, InputError, ParseError, TransportError or
/// ProtocolError for failures that prevent the run; failures inside a
/// section are recorded in diagnostics and the run continues.
QualityReport run_pipeline(const RunConfig& config, const StageSet& stages);

struct FetchedSnapshot {
    std::string file_name;
    std::string label;
    std::string body;
    std::size_t n_elements = 0;
    std::size_t n_rejects = 0;
    int attempts = 0;
};

/// Queries every configured area for every category tag (or the
/// configured tag list). Throws ConfigError without endpoint or areas.
std::vector<FetchedSnapshot> fetch_snapshots(const RunConfig& config);

} // namespace vgiq
