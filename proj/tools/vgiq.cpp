// vgiq - data-quality reports for niche OSM tag categories.

#include "vgiq/config.hpp"
#include "vgiq/error.hpp"
#include "vgiq/pipeline.hpp"
#include "vgiq/report_writer.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_input = 2,
    exit_network = 3,
    exit_partial = 4,
};

struct Options {
    std::string config;
    std::string out;
    bool verbose = false;
};

vgiq::StageSet stages_for(const std::string& sub)
{
    vgiq::StageSet s;
    if (sub == "report") {
        return vgiq::StageSet::all();
    }
    s.strict = true;
    if (sub == "analyze") {
        s.analyze = true;
    } else if (sub == "match") {
        s.match = true;
    } else if (sub == "fit") {
        s.fit = true;
    } else if (sub == "estimate") {
        s.estimate = true;
    } else if (sub == "text") {
        s.text = true;
    }
    return s;
}

int run_fetch(const vgiq::RunConfig& config, const std::filesystem::path& out, bool verbose)
{
    const auto snapshots = vgiq::fetch_snapshots(config);
    std::filesystem::create_directories(out);
    nlohmann::json manifest = nlohmann::json::array();
    std::size_t rejects = 0;
    for (const auto& s : snapshots) {
        vgiq::write_file(out / s.file_name, s.body);
        manifest.push_back({{"file", s.file_name},
                            {"label", s.label},
                            {"n_elements", s.n_elements},
                            {"n_rejects", s.n_rejects},
                            {"attempts", s.attempts}});
        rejects += s.n_rejects;
        if (verbose) {
            std::cerr << "wrote " << (out / s.file_name).string() << " (" << s.n_elements << " elements)\n";
        }
    }
    vgiq::write_file(out / "fetch.json", manifest.dump(2) + "\n");
    std::vector<vgiq::Diagnostic> diags;
    if (rejects > 0) {
        diags.push_back({"fetch", "element_rejects", "fetched elements rejected while parsing", rejects});
    }
    vgiq::write_file(out / "diagnostics.json", vgiq::diagnostics_json(diags));
    return diags.empty() ? exit_ok : exit_partial;
}

int run_subcommand(const std::string& sub, const Options& opt)
{
    try {
        const auto config = vgiq::load_config(opt.config);
        const std::filesystem::path out = opt.out.empty() ? config.output_dir : std::filesystem::path(opt.out);
        if (sub == "fetch") {
            return run_fetch(config, out, opt.verbose);
        }
        const auto report = vgiq::run_pipeline(config, stages_for(sub));
        const auto name = sub == "report" ? std::string("report.json") : sub + ".json";
        const auto written = vgiq::write_report(report, out, name);
        if (opt.verbose) {
            for (const auto& p : written) {
                std::cerr << "wrote " << p.string() << '\n';
            }
            for (const auto& d : report.diagnostics) {
                std::cerr << d.section << ": " << d.code << " (" << d.count << ") " << d.message << '\n';
            }
        }
        return report.diagnostics.empty() ? exit_ok : exit_partial;
    } catch (const vgiq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const vgiq::ParseError& e) {
        std::cerr << "parse error: " << e.what() << " (at " << e.location() << ")\n";
        return exit_input;
    } catch (const vgiq::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_input;
    } catch (const vgiq::TransportError& e) {
        std::cerr << "network error: " << e.what() << '\n';
        return exit_network;
    } catch (const vgiq::ProtocolError& e) {
        std::cerr << "network error: " << e.what() << " (HTTP " << e.status() << ")\n";
        return exit_network;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
}

} // namespace

int main(int argc, char* argv[])
{
    CLI::App app{"Data-quality reports for niche OSM tag categories"};
    app.require_subcommand(1);

    const std::map<std::string, std::string> subcommands{
        {"fetch", "Download snapshots from the Overpass endpoint"},
        {"analyze", "Category counts, contamination and per-region metrics"},
        {"match", "Match reference features to OSM nodes"},
        {"fit", "Fit density against census share"},
        {"estimate", "Estimate the total count"},
        {"text", "Text statistics of name-like tags"},
        {"report", "Run every stage the inputs allow"}};

    Options opt;
    for (const auto& [name, help] : subcommands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory (overrides output_dir)");
        sub->add_flag("--verbose", opt.verbose, "Log written files and diagnostics to stderr");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    return run_subcommand(app.get_subcommands().front()->get_name(), opt);
}
