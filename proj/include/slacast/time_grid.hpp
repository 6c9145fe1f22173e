#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace slacast {

/// Hours since 1970-01-01T00:00 UTC. Calendar arithmetic is proleptic
/// Gregorian and ignores time zones.
using HourStamp = std::int64_t;

/// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (a space may replace 'T'). Minutes and
/// seconds must be zero. Throws DataError("bad-timestamp").
HourStamp parse_timestamp(std::string_view text);

/// Renders as "YYYY-MM-DDTHH:00:00".
std::string format_timestamp(HourStamp stamp);

/// 0 = Monday ... 6 = Sunday.
int day_of_week(HourStamp stamp);
int hour_of_day(HourStamp stamp);

/// Hourly time axis: index i maps to start + i hours.
class TimeGrid {
public:
    TimeGrid(HourStamp start, std::size_t length);

    [[nodiscard]] HourStamp start() const noexcept { return start_; }
    [[nodiscard]] std::size_t length() const noexcept { return length_; }
    [[nodiscard]] HourStamp at(std::size_t index) const;
    /// Throws std::out_of_range for stamps outside the grid.
    [[nodiscard]] std::size_t index_of(HourStamp stamp) const;
    [[nodiscard]] int hour_of_day(std::size_t index) const;
    [[nodiscard]] int day_of_week(std::size_t index) const;

    /// Sub-grid [offset, offset + count).
    [[nodiscard]] TimeGrid slice(std::size_t offset, std::size_t count) const;

    bool operator==(const TimeGrid&) const = default;

private:
    HourStamp start_;
    std::size_t length_;
};

inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kHoursPerWeek = 168;

}  // namespace slacast
