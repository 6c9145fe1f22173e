#pragma once

#include "slacast/time_grid.hpp"

#include <cstddef>
#include <vector>

namespace slacast {

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    [[nodiscard]] bool overlaps(const IndexRange& other) const noexcept {
        return begin < other.end && other.begin < end;
    }
    bool operator==(const IndexRange&) const = default;
};

struct Fold {
    IndexRange train;
    IndexRange val;
};

/// Shifted-window cross-validation plan.
///
/// Every fold has the same geometry: a training block of
/// `grid.length() - K * shift` hours followed immediately by a validation
/// block of `shift` hours. Fold i starts `i * shift` hours after fold 0, so
/// the last validation block ends exactly at the end of the grid.
struct FoldPlan {
    std::size_t shift_hours = 0;
    std::vector<Fold> folds;

    [[nodiscard]] std::size_t k() const noexcept { return folds.size(); }
};

inline constexpr std::size_t kDefaultFoldShift = 8 * kHoursPerWeek;  // "2 months"

/// Throws ConfigError("infeasible-plan") if K < 1, shift is 0, or the grid
/// leaves no training hours.
FoldPlan make_folds(const TimeGrid& grid, std::size_t k, std::size_t shift_hours = kDefaultFoldShift);

}  // namespace slacast
