#include "vgiq/timeutil.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace vgiq {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len)
{
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("invalid timestamp: " + std::string(text));
    }
    return value;
}

} // namespace

Timestamp parse_iso8601(std::string_view text)
{
    // 2020-01-01T00:00:00Z
    if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text.back() != 'Z') {
        throw std::invalid_argument("invalid timestamp: " + std::string(text));
    }
    if (text.size() > 20) {
        if (text[19] != '.') {
            throw std::invalid_argument("invalid timestamp: " + std::string(text));
        }
        for (std::size_t i = 20; i + 1 < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') {
                throw std::invalid_argument("invalid timestamp: " + std::string(text));
            }
        }
    }

    using namespace std::chrono;
    const int y = parse_field(text, 0, 4);
    const int mo = parse_field(text, 5, 2);
    const int d = parse_field(text, 8, 2);
    const int h = parse_field(text, 11, 2);
    const int mi = parse_field(text, 14, 2);
    const int s = parse_field(text, 17, 2);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        throw std::invalid_argument("invalid timestamp: " + std::string(text));
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_iso8601(Timestamp t)
{
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{t - day_start};

    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

double days_between(Timestamp earlier, Timestamp later)
{
    return static_cast<double>((later - earlier).count()) / 86400.0;
}

} // namespace vgiq
