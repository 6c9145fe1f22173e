#pragma once

#include "slacast/cell_id.hpp"
#include "slacast/time_grid.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace slacast {

inline constexpr int kFeatureCount = 20;
inline constexpr const char* kTargetLabel = "F10";

/// "F1" ... "F20".
std::string feature_label(int number);
/// All twenty labels in numeric order.
const std::vector<std::string>& all_feature_labels();
/// Numeric part of "F<n>"; throws DataError("unknown-feature-label").
int feature_number(const std::string& label);

/// One named series aligned to a TimeGrid.
struct FeatureSeries {
    std::string label;
    std::vector<double> values;
};

/// Hourly counters of one cell. All series share `grid`; F10 is mandatory.
class CellDataset {
public:
    CellDataset(CellId cell, TimeGrid grid, std::map<std::string, std::vector<double>> series);

    [[nodiscard]] const CellId& cell() const noexcept { return cell_; }
    [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t length() const noexcept { return grid_.length(); }

    [[nodiscard]] bool has(const std::string& label) const { return series_.contains(label); }
    /// Throws DataError("unknown-feature-label").
    [[nodiscard]] std::span<const double> values(const std::string& label) const;
    [[nodiscard]] FeatureSeries series(const std::string& label) const;
    [[nodiscard]] std::vector<std::string> labels() const;
    [[nodiscard]] const std::map<std::string, std::vector<double>>& all() const noexcept {
        return series_;
    }

    /// Contiguous copy of hours [offset, offset + count).
    [[nodiscard]] CellDataset slice(std::size_t offset, std::size_t count) const;

    bool operator==(const CellDataset&) const = default;

private:
    CellId cell_;
    TimeGrid grid_;
    std::map<std::string, std::vector<double>> series_;
};

/// Chronological train/val/test lengths in weeks.
struct SplitSpec {
    std::size_t train_weeks = 40;
    std::size_t val_weeks = 8;
    std::size_t test_weeks = 4;

    [[nodiscard]] std::size_t total_hours() const {
        return (train_weeks + val_weeks + test_weeks) * kHoursPerWeek;
    }
};

struct DatasetSplit {
    CellDataset train;
    CellDataset val;
    CellDataset test;
};

/// Throws DataError("dataset-too-short") when the grid cannot hold the split.
DatasetSplit split_dataset(const CellDataset& ds, const SplitSpec& spec);

}  // namespace slacast
