#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace slacast {

/// Radio cell identifier: two-letter site, sector digit and carrier digit.
/// "GU14" is site GU, sector 1, carrier 4.
class CellId {
public:
    CellId() = default;
    CellId(std::string_view site, int sector, int carrier);

    /// Throws DataError("bad-cell-id") unless `text` is [A-Z]{2}[1-9][1-9].
    static CellId parse(std::string_view text);

    [[nodiscard]] std::string str() const;
    [[nodiscard]] const std::string& site() const noexcept { return site_; }
    [[nodiscard]] int sector() const noexcept { return sector_; }
    [[nodiscard]] int carrier() const noexcept { return carrier_; }

    auto operator<=>(const CellId&) const = default;

private:
    std::string site_ = "AA";
    int sector_ = 1;
    int carrier_ = 1;
};

}  // namespace slacast
