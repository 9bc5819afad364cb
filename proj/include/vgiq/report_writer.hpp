#pragma once

#include "vgiq/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vgiq {

inline constexpr int report_schema_version = 1;

/// Shortest round-trip decimal representation.
std::string format_number(double value);

/// RFC 4180 style: fields with separators, quotes or line breaks are quoted.
std::string to_csv(const CsvTable& table);

std::string diagnostics_json(const std::vector<Diagnostic>& diagnostics);

/// Deterministic serialization of the report document.
std::string report_json(const QualityReport& report);

/// Writes <report_name>, diagnostics.json, one CSV per table and
/// summary.txt (when non-empty) into `dir`, creating it if needed.
/// Returns the written paths. Throws InputError when `dir` is not writable.
std::vector<std::filesystem::path> write_report(const QualityReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& report_name = "report.json");

/// Writes a file atomically enough for our purposes (temp file + rename).
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace vgiq
