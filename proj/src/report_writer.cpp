#include "vgiq/report_writer.hpp"

#include "vgiq/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace vgiq {

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";  // also folds -0
    }
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_text(const CsvCell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const { return csv_field(s); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_number(v); }
    };
    return std::visit(Visitor{}, cell);
}

} // namespace

std::string to_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out += (i ? "," : "") + csv_field(table.header[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cell_text(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string diagnostics_json(const std::vector<Diagnostic>& diagnostics)
{
    auto list = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        list.push_back({{"section", d.section}, {"code", d.code}, {"message", d.message},
                        {"count", d.count}});
    }
    return list.dump(2) + "\n";
}

std::string report_json(const QualityReport& report)
{
    return report.document.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + path.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw InputError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw InputError("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

std::vector<std::filesystem::path> write_report(const QualityReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& report_name)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto path = dir / name;
        write_file(path, content);
        written.push_back(path);
    };
    put(report_name, report_json(report));
    put("diagnostics.json", diagnostics_json(report.diagnostics));
    for (const auto& table : report.tables) {
        put(table.name + ".csv", to_csv(table));
    }
    if (!report.summary.empty()) {
        put("summary.txt", report.summary);
    }
    return written;
}

} // namespace vgiq
