#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace vgiq {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (optional fractional seconds are
/// truncated). Throws std::invalid_argument on anything else.
Timestamp parse_iso8601(std::string_view text);

std::string format_iso8601(Timestamp t);

/// Fractional days from `earlier` to `later`.
double days_between(Timestamp earlier, Timestamp later);

} // namespace vgiq
