#include "slacast/time_grid.hpp"

#include "slacast/error.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace slacast {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t y;
    unsigned m;
    unsigned d;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    if (pos + len > text.size()) throw DataError("bad-timestamp", std::string(text));
    const auto* first = text.data() + pos;
    const auto res = std::from_chars(first, first + len, value);
    if (res.ec != std::errc{} || res.ptr != first + len) throw DataError("bad-timestamp", std::string(text));
    return value;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos)
        throw DataError("bad-timestamp", std::string(text));
}

}  // namespace

HourStamp parse_timestamp(std::string_view text) {
    while (!text.empty() && (text.back() == 'Z' || text.back() == '\r' || text.back() == ' '))
        text.remove_suffix(1);
    const int year = read_int(text, 0, 4);
    expect(text, 4, "-");
    const int month = read_int(text, 5, 2);
    expect(text, 7, "-");
    const int day = read_int(text, 8, 2);
    expect(text, 10, "T ");
    const int hour = read_int(text, 11, 2);
    int minute = 0;
    int second = 0;
    if (text.size() > 13) {
        expect(text, 13, ":");
        minute = read_int(text, 14, 2);
        if (text.size() > 16) {
            expect(text, 16, ":");
            second = read_int(text, 17, 2);
            if (text.size() != 19) throw DataError("bad-timestamp", std::string(text));
        }
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 59)
        throw DataError("bad-timestamp", std::string(text));
    if (minute != 0 || second != 0)
        throw DataError("non-hourly-timestamps", "timestamp not on an hour boundary: " + std::string(text));
    const auto days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    if (civil_from_days(days).d != static_cast<unsigned>(day)) throw DataError("bad-timestamp", std::string(text));
    return days * 24 + hour;
}

std::string format_timestamp(HourStamp stamp) {
    const auto days = floor_div(stamp, 24);
    const auto hour = static_cast<int>(stamp - days * 24);
    const auto c = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:00:00", static_cast<long long>(c.y), c.m, c.d, hour);
    return buf;
}

int day_of_week(HourStamp stamp) {
    // 1970-01-01 was a Thursday (index 3 with Monday = 0).
    const auto days = floor_div(stamp, 24);
    return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

int hour_of_day(HourStamp stamp) { return static_cast<int>(stamp - floor_div(stamp, 24) * 24); }

TimeGrid::TimeGrid(HourStamp start, std::size_t length) : start_(start), length_(length) {
    if (length == 0) throw DataError("empty-grid", "time grid needs at least one hour");
}

HourStamp TimeGrid::at(std::size_t index) const {
    if (index >= length_) throw std::out_of_range("grid index " + std::to_string(index));
    return start_ + static_cast<HourStamp>(index);
}

std::size_t TimeGrid::index_of(HourStamp stamp) const {
    if (stamp < start_ || stamp >= start_ + static_cast<HourStamp>(length_))
        throw std::out_of_range("timestamp " + format_timestamp(stamp) + " outside grid");
    return static_cast<std::size_t>(stamp - start_);
}

int TimeGrid::hour_of_day(std::size_t index) const { return slacast::hour_of_day(at(index)); }
int TimeGrid::day_of_week(std::size_t index) const { return slacast::day_of_week(at(index)); }

TimeGrid TimeGrid::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > length_) throw std::out_of_range("grid slice past end");
    return TimeGrid(start_ + static_cast<HourStamp>(offset), count);
}

}  // namespace slacast
