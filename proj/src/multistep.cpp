#include "slacast/multistep.hpp"

#include "slacast/error.hpp"

#include <algorithm>

namespace slacast {

namespace {

using Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

enum class ColumnKind { target, counter, peak_day, peak_hour, handover_in, handover_out };

ColumnKind kind_of(const std::string& column) {
    if (column == kTargetLabel) return ColumnKind::target;
    if (column == kPeakDayColumn) return ColumnKind::peak_day;
    if (column == kPeakHourColumn) return ColumnKind::peak_hour;
    if (column == kHandoverInColumn) return ColumnKind::handover_in;
    if (column == kHandoverOutColumn) return ColumnKind::handover_out;
    return ColumnKind::counter;
}

void check_table(const ForecastModel& model, const FeatureTable& table) {
    if (table.columns != model.recipe.columns())
        throw DataError("shape-mismatch", "feature table columns do not match the model recipe");
}

}  // namespace

const char* to_string(ExogenousPolicy policy) {
    return policy == ExogenousPolicy::seasonal_naive ? "seasonal-naive" : "neighbor-recursive";
}

ExogenousPolicy parse_policy(const std::string& text) {
    if (text == "seasonal-naive") return ExogenousPolicy::seasonal_naive;
    if (text == "neighbor-recursive") return ExogenousPolicy::neighbor_recursive;
    throw ConfigError("unknown-policy", "'" + text + "' (expected seasonal-naive or neighbor-recursive)");
}

void HorizonPlan::validate() const {
    if (horizons.empty()) throw ConfigError("invalid-horizons", "at least one horizon is required");
    for (auto h : horizons)
        if (h == 0) throw ConfigError("invalid-horizons", "horizons must be at least 1");
}

std::size_t history_rows(const ForecastModel& model) {
    const bool seasonal = model.recipe.uses_ran() || model.recipe.uses_handover();
    return seasonal ? std::max(model.spec.lookback, kSeasonalLag) : model.spec.lookback;
}

double predict_one(const ForecastModel& model, const FeatureTable& table, std::size_t origin) {
    check_table(model, table);
    const std::size_t L = model.spec.lookback;
    if (origin < L || origin > static_cast<std::size_t>(table.values.rows()))
        throw DataError("shape-mismatch", "origin needs " + std::to_string(L) + " hours of history");
    const Frame window = normalize_inputs(model, table.values.middleRows(ix(origin - L), ix(L)));
    return model.normalizer.invert(kTargetLabel, forward(model.params, window));
}

std::vector<double> predict_multistep(const ForecastModel& model, const FeatureTable& table, std::size_t origin,
                                      std::size_t steps, const HorizonPlan& plan, const NeighborContext* neighbors) {
    return trace_multistep(model, table, origin, steps, plan, neighbors).predictions;
}

MultistepTrace trace_multistep(const ForecastModel& model, const FeatureTable& table, std::size_t origin,
                               std::size_t steps, const HorizonPlan& plan, const NeighborContext* neighbors) {
    check_table(model, table);
    const std::size_t L = model.spec.lookback;
    const std::size_t hist = history_rows(model);
    if (origin < hist || origin > static_cast<std::size_t>(table.values.rows()))
        throw DataError("shape-mismatch", "origin needs " + std::to_string(hist) + " hours of history");
    if (steps == 0) return {{}, table.values.middleRows(ix(origin - hist), ix(hist))};

    const auto& columns = model.recipe.columns();
    std::vector<ColumnKind> kinds;
    for (const auto& c : columns) kinds.push_back(kind_of(c));

    // Neighbor forecasts for the handover columns, when requested.
    std::map<CellId, std::vector<double>> neighbor_future;
    const bool recursive_handover =
        model.recipe.uses_handover() && plan.handover_policy == ExogenousPolicy::neighbor_recursive;
    if (recursive_handover) {
        std::vector<CellId> cells;
        for (const auto* w : {&model.recipe.incoming_weights, &model.recipe.outgoing_weights})
            for (const auto& [cell, _] : *w)
                if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
        for (const auto& cell : cells) {
            if (neighbors == nullptr || !neighbors->models.contains(cell))
                throw DataError("missing-neighbor-model", "no model for neighbor " + cell.str());
            if (!neighbors->f10.contains(cell))
                throw DataError("missing-neighbor-series", "no F10 history for neighbor " + cell.str());
            const auto& nm = neighbors->models.at(cell);
            if (nm.recipe.variant != Variant::univariate)
                throw DataError("missing-neighbor-model", "neighbor models must be univariate");
            const auto& series = neighbors->f10.at(cell);
            const std::size_t nh = history_rows(nm);
            if (origin < nh || series.size() < origin)
                throw DataError("shape-mismatch", "neighbor history too short for " + cell.str());
            FeatureTable nt{table.grid.slice(origin - nh, nh), {kTargetLabel}, Frame(ix(nh), 1)};
            for (std::size_t r = 0; r < nh; ++r) nt.values(ix(r), 0) = series[origin - nh + r];
            neighbor_future[cell] = predict_multistep(nm, nt, nh, steps, plan, nullptr);
        }
    }

    // Raw and normalized working buffers: `hist` observed rows, then the future.
    Frame raw(ix(hist + steps), ix(columns.size()));
    raw.topRows(ix(hist)) = table.values.middleRows(ix(origin - hist), ix(hist));
    Frame norm(raw.rows(), raw.cols());
    auto normalize_row = [&](std::size_t r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            norm(ix(r), ix(c)) = is_boolean_column(columns[c]) ? raw(ix(r), ix(c))
                                                               : model.normalizer.apply(columns[c], raw(ix(r), ix(c)));
    };
    for (std::size_t r = 0; r < hist; ++r) normalize_row(r);

    std::vector<double> out(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t row = hist + k;
        const double pred_norm = forward(model.params, norm.middleRows(ix(row - L), ix(L)));
        out[k] = model.normalizer.invert(kTargetLabel, pred_norm);

        const HourStamp stamp = table.grid.start() + static_cast<HourStamp>(origin + k);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            double& cell = raw(ix(row), ix(c));
            switch (kinds[c]) {
                case ColumnKind::target: cell = out[k]; break;
                case ColumnKind::counter: cell = raw(ix(row - kSeasonalLag), ix(c)); break;
                case ColumnKind::peak_day:
                    cell = model.recipe.peak->weekend_days.contains(day_of_week(stamp)) ? 0.0 : 1.0;
                    break;
                case ColumnKind::peak_hour:
                    cell = model.recipe.peak->peak_hours.contains(hour_of_day(stamp)) ? 1.0 : 0.0;
                    break;
                case ColumnKind::handover_in:
                case ColumnKind::handover_out:
                    if (recursive_handover) {
                        const auto& weights = kinds[c] == ColumnKind::handover_in ? model.recipe.incoming_weights
                                                                                   : model.recipe.outgoing_weights;
                        cell = 0.0;
                        for (const auto& [n, w] : weights) cell += w * neighbor_future.at(n)[k];
                    } else {
                        cell = raw(ix(row - kSeasonalLag), ix(c));
                    }
                    break;
            }
        }
        normalize_row(row);
    }
    return {std::move(out), std::move(raw)};
}

}  // namespace slacast
