#include "vgiq/overpass.hpp"

#include "httplib.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace vgiq::overpass {

std::string build_query(std::string_view tag_key, std::string_view tag_value,
                        std::string_view area_code, int timeout_s)
{
    if (tag_key.empty() || tag_value.empty() || area_code.empty()) {
        throw std::invalid_argument("build_query: empty tag key, value or area code");
    }
    if (timeout_s <= 0) {
        throw std::invalid_argument("build_query: timeout must be positive");
    }
    // Country codes ("AT") live under ISO3166-1, subdivisions ("DE-BY") under ISO3166-2.
    const std::string_view area_key =
        area_code.find('-') == std::string_view::npos ? "ISO3166-1" : "ISO3166-2";

    std::string q;
    q += "[out:json][timeout:" + std::to_string(timeout_s) + "];";
    q += "area[\"";
    q += area_key;
    q += "\"=\"";
    q += area_code;
    q += "\"]->.a;node[\"";
    q += tag_key;
    q += "\"=\"";
    q += tag_value;
    q += "\"](area.a);out meta;";
    return q;
}

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // .../api/interpreter
};

Endpoint split_endpoint(std::string_view url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw std::invalid_argument("endpoint URL needs a scheme: " + std::string(url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    ep.origin = std::string(url.substr(0, path_start));
    std::string prefix =
        path_start == std::string_view::npos ? std::string() : std::string(url.substr(path_start));
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    ep.path = prefix + "/api/interpreter";
    return ep;
}

bool retryable(int status)
{
    return status == 429 || status == 504;
}

} // namespace

FetchResult fetch(std::string_view endpoint_url, std::string_view query,
                  const FetchOptions& options)
{
    const auto ep = split_endpoint(endpoint_url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(options.connect_timeout);
    client.set_read_timeout(options.read_timeout);

    const httplib::Params params{{"data", std::string(query)}};
    const int max_attempts = std::max(0, options.retries) + 1;

    FetchResult out;
    auto delay = options.backoff_base;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
        ++out.attempts;
        const auto res = client.Post(ep.path, params);
        if (!res) {
            if (attempt + 1 == max_attempts) {
                throw TransportError("Overpass request failed: " + httplib::to_string(res.error()));
            }
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            const auto received = std::chrono::time_point_cast<std::chrono::seconds>(
                std::chrono::system_clock::now());
            out.body = res->body;
            out.parsed = parse_osm_json(out.body, received, SnapshotSource::overpass);
            out.parsed.set.snapshot_time = received;
            return out;
        }
        if (!retryable(res->status) || attempt + 1 == max_attempts) {
            throw ProtocolError("Overpass returned HTTP " + std::to_string(res->status),
                                res->status);
        }
    }
    throw TransportError("Overpass request failed");
}

std::vector<FetchResult> fetch_all(std::string_view endpoint_url, std::span<const FetchJob> jobs,
                                   const FetchOptions& options, unsigned workers)
{
    std::vector<FetchResult> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    const std::string endpoint(endpoint_url);

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            try {
                results[i] = fetch(endpoint, jobs[i].query, options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) {
        pool.emplace_back(worker);
    }
    pool.clear();

    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
    return results;
}

} // namespace vgiq::overpass
