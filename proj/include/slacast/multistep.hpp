#pragma once

#include "slacast/features.hpp"
#include "slacast/model.hpp"

#include <map>
#include <vector>

namespace slacast {

/// How non-target columns are filled for hours past the forecast origin.
/// Calendar columns are always computed exactly from the future timestamps.
enum class ExogenousPolicy {
    seasonal_naive,      // value 24 hours earlier
    neighbor_recursive,  // handover columns only: neighbors' own recursive forecasts
};

const char* to_string(ExogenousPolicy policy);
/// Accepts "seasonal-naive" and "neighbor-recursive".
ExogenousPolicy parse_policy(const std::string& text);

inline const std::vector<std::size_t>& default_horizons() {
    static const std::vector<std::size_t> h{1, 2, 4, 8, 24};
    return h;
}

struct HorizonPlan {
    std::vector<std::size_t> horizons = default_horizons();
    ExogenousPolicy handover_policy = ExogenousPolicy::seasonal_naive;

    /// Throws ConfigError("invalid-horizons").
    void validate() const;
};

inline constexpr std::size_t kSeasonalLag = 24;

/// Neighbor inputs for the neighbor-recursive policy: each neighbor's
/// univariate model and its raw F10 over the same grid as the table.
struct NeighborContext {
    std::map<CellId, ForecastModel> models;
    std::map<CellId, std::vector<double>> f10;
};

/// Rows of history a forecast reads before `origin`.
std::size_t history_rows(const ForecastModel& model);

/// Next-hour forecast in raw units from rows [origin - lookback, origin).
/// Throws DataError("shape-mismatch") when the table does not match the
/// recipe or the history is too short.
double predict_one(const ForecastModel& model, const FeatureTable& table, std::size_t origin);

/// Recursive forecasts for hours origin .. origin + steps - 1 in raw units.
/// Only rows before `origin` are read; predicted F10 values are fed back.
/// Throws DataError("missing-neighbor-model") under the neighbor-recursive
/// policy without a model for a listed neighbor.
/// Predictions plus the raw input rows used for them: `history_rows(model)`
/// observed rows followed by `steps` filled rows (row `hist + k` holds the
/// inputs constructed for hour origin + k).
struct MultistepTrace {
    std::vector<double> predictions;
    Frame inputs;
};

MultistepTrace trace_multistep(const ForecastModel& model, const FeatureTable& table, std::size_t origin,
                               std::size_t steps, const HorizonPlan& plan = {},
                               const NeighborContext* neighbors = nullptr);

std::vector<double> predict_multistep(const ForecastModel& model, const FeatureTable& table, std::size_t origin,
                                      std::size_t steps, const HorizonPlan& plan = {},
                                      const NeighborContext* neighbors = nullptr);

}  // namespace slacast
