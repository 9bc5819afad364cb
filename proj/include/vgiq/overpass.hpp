#pragma once

#include "vgiq/ingest.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace vgiq::overpass {

/// Overpass QL selecting nodes with KEY=VALUE inside an ISO 3166 area,
/// with meta output. Throws std::invalid_argument on empty input.
std::string build_query(std::string_view tag_key, std::string_view tag_value,
                        std::string_view area_code, int timeout_s);

struct FetchOptions {
    int retries = 3;
    std::chrono::milliseconds backoff_base{10000};  // doubles per retry
    std::chrono::seconds connect_timeout{30};
    std::chrono::seconds read_timeout{600};
};

struct FetchResult {
    OsmParseResult parsed;
    std::string body;
    int attempts = 0;
};

/// POSTs data=<query> to <endpoint_url>/api/interpreter; retries on HTTP
/// 429 and 504 with exponential backoff, at most retries + 1 requests.
/// Throws TransportError, ProtocolError or ParseError.
FetchResult fetch(std::string_view endpoint_url, std::string_view query,
                  const FetchOptions& options = {});

struct FetchJob {
    std::string label;
    std::string query;
};

/// Runs jobs with at most `workers` concurrent requests; results keep job
/// order. The first failure is rethrown after all workers finish.
std::vector<FetchResult> fetch_all(std::string_view endpoint_url, std::span<const FetchJob> jobs,
                                   const FetchOptions& options, unsigned workers = 2);

} // namespace vgiq::overpass
