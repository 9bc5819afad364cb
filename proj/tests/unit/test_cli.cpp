#include "doctest.h"

#include "stub_server.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using nlohmann::json;

namespace {

const std::filesystem::path fixture_dir = std::filesystem::path(VGIQ_FIXTURE_DIR) / "synthetic";

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("vgiq_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + VGIQ_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::filesystem::path write_config(const std::filesystem::path& dir, const json& doc)
{
    const auto path = dir / "config.json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

json fixture_json(const std::string& name)
{
    std::ifstream in(fixture_dir / name);
    return json::parse(in);
}

// Fixture config with absolute paths so it can live in a scratch dir.
json absolute_fixture_config()
{
    auto doc = fixture_json("config.json");
    auto abs = [](const json& p) { return (fixture_dir / p.get<std::string>()).string(); };
    for (auto& p : doc["snapshot_paths"]) {
        p = abs(p);
    }
    for (const char* key : {"regions_path", "references_path", "census_path", "lexicon_path"}) {
        doc[key] = abs(doc[key]);
    }
    for (auto& [k, v] : doc["corpora_paths"].items()) {
        v = abs(v);
    }
    for (auto& [k, v] : doc["text"]["tagged_paths"].items()) {
        v = abs(v);
    }
    for (auto& cmp : doc["comparisons"]) {
        for (auto& p : cmp["snapshot_paths"]) {
            p = abs(p);
        }
    }
    return doc;
}

} // namespace

TEST_CASE("report succeeds with exit 0 and writes the artifacts")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto out = scratch_dir("ok");
    CHECK(run_cli("report --config \"" + (fixture_dir / "config.json").string() + "\" --out \"" + out.string() + "\"") == 0);
    for (const char* f : {"report.json", "diagnostics.json", "matches.csv", "densities.csv", "match_curve.csv",
                          "match_bins.csv", "fit_curve.csv", "age_stats.csv", "version_histogram.csv"}) {
        CHECK_MESSAGE(std::filesystem::exists(out / f), f);
    }
}

TEST_CASE("each subcommand writes its own report file")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto out = scratch_dir("subs");
    const auto cfg = (fixture_dir / "config.json").string();
    for (const char* sub : {"analyze", "match", "fit", "estimate", "text"}) {
        CHECK_MESSAGE(run_cli(std::string(sub) + " --config \"" + cfg + "\" --out \"" + out.string() + "\"") == 0, sub);
        CHECK_MESSAGE(std::filesystem::exists(out / (std::string(sub) + ".json")), sub);
    }
}

TEST_CASE("config errors exit 1")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto dir = scratch_dir("config");
    const auto cfg = write_config(dir, json{{"regions_path", (fixture_dir / "regions.geojson").string()}});
    CHECK(run_cli("report --config \"" + cfg.string() + "\"") == 1);
    CHECK(run_cli("report --config \"" + (dir / "missing.json").string() + "\"") == 1);
    CHECK(run_cli("report") == 1);
    CHECK(run_cli("frobnicate --config x") == 1);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run_cli("report --config \"" + (dir / "broken.json").string() + "\"") == 1);
}

TEST_CASE("input and parse errors exit 2")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto dir = scratch_dir("input");
    std::ofstream(dir / "bad.json") << "{\"elements\": [";
    auto doc = absolute_fixture_config();
    doc["snapshot_paths"] = {(dir / "bad.json").string()};
    CHECK(run_cli("report --config \"" + write_config(dir, doc).string() + "\" --out \"" + (dir / "o").string() + "\"") == 2);

    doc = absolute_fixture_config();
    doc["references_path"] = (dir / "absent.geojson").string();
    CHECK(run_cli("report --config \"" + write_config(dir, doc).string() + "\" --out \"" + (dir / "o").string() + "\"") == 2);
}

TEST_CASE("unreachable endpoint exits 3")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto dir = scratch_dir("network");
    const json doc{{"overpass_endpoint", "http://127.0.0.1:1"},
                   {"regions_path", (fixture_dir / "regions.geojson").string()},
                   {"fetch", {{"areas", {"DE-BY"}}, {"retries", 0}, {"timeout_s", 2}}}};
    const auto cfg = write_config(dir, doc);
    CHECK(run_cli("fetch --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"") == 3);
    CHECK(run_cli("report --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"") == 3);
}

TEST_CASE("diagnostics make the run partial: exit 4")
{
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    const auto dir = scratch_dir("partial");
    auto snapshot = fixture_json("snapshot.json");
    snapshot["elements"].push_back({{"type", "node"}, {"id", 9}, {"lat", 95.0}, {"lon", 11.0}});
    std::ofstream(dir / "snapshot.json") << snapshot.dump();
    auto doc = absolute_fixture_config();
    doc["snapshot_paths"] = {(dir / "snapshot.json").string()};
    CHECK(run_cli("report --config \"" + write_config(dir, doc).string() + "\" --out \"" + (dir / "o").string() + "\"") == 4);
    std::ifstream in(dir / "o" / "diagnostics.json");
    const auto diags = json::parse(in);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0]["code"] == "element_rejects");
    CHECK(diags[0]["count"] == 1);
}

TEST_CASE("environment variable overrides the configured endpoint")
{
    StubServer stub;
    int requests = 0;
    std::string body;
    {
        std::ifstream in(fixture_dir / "snapshot.json");
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    stub.server().Post("/api/interpreter", [&](const httplib::Request&, httplib::Response& res) {
        ++requests;
        res.set_content(body, "application/json");
    });
    const auto dir = scratch_dir("env");
    const json doc{{"overpass_endpoint", "http://127.0.0.1:1"},
                   {"regions_path", (fixture_dir / "regions.geojson").string()},
                   {"categories", {"HWC", "HWS"}},
                   {"fetch", {{"areas", {"DE-BY"}}, {"retries", 0}}}};
    const auto cfg = write_config(dir, doc);
    setenv("VGIQ_OVERPASS_ENDPOINT", stub.url().c_str(), 1);
    CHECK(run_cli("fetch --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"") == 0);
    unsetenv("VGIQ_OVERPASS_ENDPOINT");
    CHECK(requests == 2);
    CHECK(std::filesystem::exists(dir / "snapshot_DE-BY_historic_wayside_cross.json"));
    CHECK(std::filesystem::exists(dir / "snapshot_DE-BY_historic_wayside_shrine.json"));
    std::ifstream in(dir / "fetch.json");
    const auto manifest = json::parse(in);
    REQUIRE(manifest.size() == 2);
    CHECK(manifest[0]["n_elements"].get<int>() > 0);
}
