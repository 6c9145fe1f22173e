#pragma once

#include "slacast/dataset.hpp"
#include "slacast/handover.hpp"
#include "slacast/window.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace slacast {

/// Product-moment correlation. Throws DataError("length-mismatch") for
/// unequal or shorter-than-2 inputs and ("constant-input") when either side
/// has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// |pearson(F, F10)| of every non-F10 series, keyed by label. Constant
/// series are omitted and reported through `skipped`.
std::map<std::string, double> correlation_with_target(const CellDataset& ds,
                                                      std::vector<std::string>* skipped = nullptr);

/// Labels other than F10 with |pearson(F, F10)| >= threshold, in numeric
/// label order. Run on the training slice only.
std::vector<std::string> select_ran_features(const CellDataset& train, double threshold = 0.90,
                                             std::vector<std::string>* skipped = nullptr);

inline constexpr double kDefaultCorrelationThreshold = 0.90;
inline constexpr double kDefaultPeakThreshold = 0.2;

/// Saturday and Sunday (0 = Monday).
std::set<int> default_weekend();

/// Hour-of-day occurrence of daily F10 maxima.
struct PeakProfile {
    std::set<int> peak_hours;
    std::array<double, 24> occurrence{};
    double threshold = kDefaultPeakThreshold;
    std::set<int> weekend_days = default_weekend();
    std::size_t days = 0;

    bool operator==(const PeakProfile&) const = default;
};

/// 1 for hours whose day of week is not in `weekend_days`, else 0.
FeatureSeries peak_days_vector(const TimeGrid& grid, const std::set<int>& weekend_days);

/// Records the hour of the maximum of every full calendar day (ties go to the
/// earliest hour) and marks hours whose occurrence fraction exceeds `tau`.
/// Throws DataError("too-short-series") with fewer than two full days.
PeakProfile detect_peak_hours(std::span<const double> f10, const TimeGrid& grid,
                              double tau = kDefaultPeakThreshold,
                              const std::set<int>& weekend_days = default_weekend());

/// 1 where the hour of day is a peak hour.
FeatureSeries peak_hours_vector(const PeakProfile& profile, const TimeGrid& grid);

struct HandoverFeatures {
    FeatureSeries incoming;
    FeatureSeries outgoing;
};

/// Rate-weighted averages of neighbor F10 series per handover direction.
/// Weights are the listed rates renormalized to sum to 1.
/// Errors: DataError("missing-neighbor-series"), ("empty-cluster").
HandoverFeatures handover_features(const CellId& target,
                                   const std::map<CellId, std::vector<double>>& neighbor_f10,
                                   const HandoverMatrix& ho);

/// Weighted sum used by handover_features; exposed for recursive filling.
std::vector<double> weighted_average(const std::vector<std::pair<CellId, double>>& weights,
                                     const std::map<CellId, std::vector<double>>& series);

enum class Variant { univariate, ran, peak, handover, all };

const std::vector<Variant>& all_variants();
const char* to_string(Variant v);
/// Throws ConfigError("unknown-variant").
Variant parse_variant(const std::string& name);
/// Display name used in reports, e.g. "mvLSTM-handover".
const char* display_name(Variant v);

// Column names of derived inputs.
inline constexpr const char* kPeakDayColumn = "PEAK_DAY";
inline constexpr const char* kPeakHourColumn = "PEAK_HOUR";
inline constexpr const char* kHandoverInColumn = "HO_IN";
inline constexpr const char* kHandoverOutColumn = "HO_OUT";

/// Everything needed to rebuild a model's input columns from raw data.
struct FeatureRecipe {
    Variant variant = Variant::univariate;
    CellId target;
    std::vector<std::string> ran_labels;
    std::optional<PeakProfile> peak;
    std::vector<std::pair<CellId, double>> incoming_weights;
    std::vector<std::pair<CellId, double>> outgoing_weights;
    std::size_t lookback = kDefaultLookback;

    /// F10 first, then RAN labels, peak columns, handover columns.
    [[nodiscard]] std::vector<std::string> columns() const;
    [[nodiscard]] std::size_t width() const { return columns().size(); }
    [[nodiscard]] bool uses_ran() const;
    [[nodiscard]] bool uses_peak() const;
    [[nodiscard]] bool uses_handover() const;

    bool operator==(const FeatureRecipe&) const = default;
};

/// Calendar columns enter the model as {0, 1} without z-scoring.
bool is_boolean_column(const std::string& column);

struct FeatureOptions {
    double correlation_threshold = kDefaultCorrelationThreshold;
    double peak_threshold = kDefaultPeakThreshold;
    std::set<int> weekend_days = default_weekend();
    std::size_t lookback = kDefaultLookback;
};

/// Fits the variant's feature choices on the training slice. `ho` is only
/// required for handover-based variants (ConfigError("missing-handover")).
FeatureRecipe build_recipe(Variant variant, const CellDataset& train, const HandoverMatrix* ho,
                           const FeatureOptions& options = {});

/// Raw recipe columns over a grid.
struct FeatureTable {
    TimeGrid grid;
    std::vector<std::string> columns;
    Frame values;  // grid.length() x columns.size()

    [[nodiscard]] std::size_t column_index(const std::string& name) const;
    [[nodiscard]] FeatureTable rows(std::size_t offset, std::size_t count) const;
};

/// Materializes the recipe on `ds` (its whole grid). Handover columns read
/// the F10 series of `region` cells over the same grid.
/// Errors: DataError("missing-neighbor-series").
FeatureTable assemble_inputs(const FeatureRecipe& recipe, const CellDataset& ds,
                             const std::map<CellId, CellDataset>* region = nullptr);

}  // namespace slacast
