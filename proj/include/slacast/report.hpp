#pragma once

#include "slacast/features.hpp"
#include "slacast/model.hpp"
#include "slacast/multistep.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slacast {

/// Metrics of one (variant, SLA, horizon) combination on the test slice.
struct ReportCell {
    Variant variant = Variant::univariate;
    int sla_percent = 5;
    std::size_t horizon = 1;
    bool skipped = false;
    std::string skip_reason;
    std::size_t samples = 0;
    double w = 1.0;
    double test_loss = 0.0;       // normalized units
    double violation_rate = 0.0;  // percent
    double volume = 0.0;          // raw units, unconditional mean
    double conditional_volume = 0.0;
    double mae = 0.0;
    double mse = 0.0;
};

struct CalibrationSummary {
    int sla_percent = 5;
    double w = 1.0;
    double val_violation_rate = 0.0;  // percent
    double val_volume = 0.0;
    bool satisfied = false;
};

struct EvalReport {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string target_cell;
    std::string volume_unit;
    std::vector<Variant> variants;
    std::vector<int> sla_percents;
    std::vector<std::size_t> horizons;
    std::vector<CalibrationSummary> calibration;
    std::vector<ReportCell> cells;

    [[nodiscard]] const ReportCell* find(Variant v, int sla_percent, std::size_t horizon) const;
    /// Every (variant, SLA, horizon) triple is present (possibly skipped).
    [[nodiscard]] bool complete() const;
};

/// Forecasts at every test hour for one model: `by_horizon[h]` holds the
/// h-step-ahead predictions and matching actuals, origins one hour apart.
struct HorizonSeries {
    std::vector<double> pred;
    std::vector<double> actual;
    std::vector<HourStamp> stamps;  // time of the predicted hour
};

/// Rolling-origin forecasts over rows [begin, end) of `table`.
std::map<std::size_t, HorizonSeries> rolling_forecasts(const ForecastModel& model, const FeatureTable& table,
                                                       std::size_t begin, std::size_t end,
                                                       const HorizonPlan& plan,
                                                       const NeighborContext* neighbors = nullptr);

/// Metrics of one horizon series.
ReportCell score_cell(const HorizonSeries& series, const ForecastModel& model, Variant variant, int sla_percent,
                      std::size_t horizon);

struct ReportInputs {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string target_cell;
    std::string volume_unit;
    std::vector<Variant> variants;
    std::vector<int> sla_percents;
    HorizonPlan plan;
    std::vector<CalibrationSummary> calibration;
    /// Keyed by (variant, sla percent).
    std::map<std::pair<Variant, int>, const ForecastModel*> models;
    std::map<Variant, const FeatureTable*> tables;
    std::size_t test_begin = 0;
    std::size_t test_end = 0;
    /// Neighbor models per SLA percent, for the neighbor-recursive policy.
    std::map<int, const NeighborContext*> neighbors;
    std::size_t jobs = 1;
};

/// Scores every (variant, SLA, horizon) triple. Throws
/// DataError("missing-model") when a model or feature table is absent.
/// `series_out`, when given, receives the per-model horizon series.
EvalReport build_report(const ReportInputs& inputs,
                        std::map<std::pair<Variant, int>, std::map<std::size_t, HorizonSeries>>* series_out = nullptr);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Published single-step and multi-step figures for a private LTE cell,
/// carried as static annotation. Not comparable in absolute terms.
nlohmann::json published_reference();

/// One row per (variant, SLA) at horizon 1: loss, volumes, violation rate.
std::string single_step_csv(const EvalReport& report);
/// One row per (variant, SLA) with the test loss at every horizon.
std::string multistep_csv(const EvalReport& report);
/// `timestamp,actual,pred_<variant>...` for figure regeneration.
std::string plot_csv(const std::vector<HourStamp>& stamps, const std::vector<double>& actual,
                     const std::vector<std::pair<std::string, std::vector<double>>>& predictions);

}  // namespace slacast
