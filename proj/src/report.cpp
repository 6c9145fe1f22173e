#include "slacast/report.hpp"

#include "slacast/csv_io.hpp"
#include "slacast/error.hpp"
#include "slacast/metrics.hpp"
#include "slacast/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace slacast {

using nlohmann::json;

const ReportCell* EvalReport::find(Variant v, int sla_percent, std::size_t horizon) const {
    for (const auto& c : cells)
        if (c.variant == v && c.sla_percent == sla_percent && c.horizon == horizon) return &c;
    return nullptr;
}

bool EvalReport::complete() const {
    for (auto v : variants)
        for (int s : sla_percents)
            for (auto h : horizons)
                if (find(v, s, h) == nullptr) return false;
    return true;
}

std::map<std::size_t, HorizonSeries> rolling_forecasts(const ForecastModel& model, const FeatureTable& table,
                                                       std::size_t begin, std::size_t end, const HorizonPlan& plan,
                                                       const NeighborContext* neighbors) {
    plan.validate();
    if (end > static_cast<std::size_t>(table.values.rows()) || begin >= end)
        throw DataError("shape-mismatch", "evaluation range outside the feature table");
    const std::size_t max_h = *std::max_element(plan.horizons.begin(), plan.horizons.end());
    const std::size_t target_col = table.column_index(kTargetLabel);
    std::map<std::size_t, HorizonSeries> out;
    for (auto h : plan.horizons) out[h];
    for (std::size_t origin = begin; origin < end; ++origin) {
        const std::size_t steps = std::min(max_h, end - origin);
        const auto pred = predict_multistep(model, table, origin, steps, plan, neighbors);
        for (auto h : plan.horizons) {
            if (h > steps) continue;
            const std::size_t row = origin + h - 1;
            auto& s = out[h];
            s.pred.push_back(pred[h - 1]);
            s.actual.push_back(table.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(target_col)));
            s.stamps.push_back(table.grid.at(row));
        }
    }
    return out;
}

ReportCell score_cell(const HorizonSeries& series, const ForecastModel& model, Variant variant, int sla_percent,
                      std::size_t horizon) {
    ReportCell cell;
    cell.variant = variant;
    cell.sla_percent = sla_percent;
    cell.horizon = horizon;
    cell.w = model.loss.w;
    cell.samples = series.pred.size();
    if (series.pred.empty()) {
        cell.skipped = true;
        cell.skip_reason = "no test origins for this horizon";
        return cell;
    }
    cell.test_loss = test_loss(series.pred, series.actual, model.normalizer.at(kTargetLabel), model.loss.w);
    cell.violation_rate = sla_violation_rate(series.pred, series.actual);
    const auto vol = overprovisioning_volume(series.pred, series.actual);
    cell.volume = vol.unconditional;
    cell.conditional_volume = vol.conditional;
    cell.mae = mean_absolute_error(series.pred, series.actual);
    cell.mse = mean_squared_error(series.pred, series.actual);
    return cell;
}

EvalReport build_report(const ReportInputs& in,
                        std::map<std::pair<Variant, int>, std::map<std::size_t, HorizonSeries>>* series_out) {
    EvalReport report;
    report.config_hash = in.config_hash;
    report.seed = in.seed;
    report.target_cell = in.target_cell;
    report.volume_unit = in.volume_unit;
    report.variants = in.variants;
    report.sla_percents = in.sla_percents;
    report.horizons = in.plan.horizons;
    report.calibration = in.calibration;

    std::vector<std::pair<Variant, int>> keys;
    for (auto v : in.variants)
        for (int s : in.sla_percents) {
            const auto it = in.models.find({v, s});
            if (it == in.models.end() || it->second == nullptr)
                throw DataError("missing-model", std::string("no model for ") + to_string(v) + " at " +
                                                     std::to_string(s) + "% SLA");
            if (!in.tables.contains(v)) throw DataError("missing-model", std::string("no feature table for ") + to_string(v));
            keys.emplace_back(v, s);
        }

    std::vector<std::map<std::size_t, HorizonSeries>> series(keys.size());
    parallel_for(keys.size(), in.jobs, [&](std::size_t i) {
        const auto& model = *in.models.at(keys[i]);
        series[i] = rolling_forecasts(model, *in.tables.at(keys[i].first), in.test_begin, in.test_end, in.plan,
                                      in.neighbors.contains(keys[i].second) ? in.neighbors.at(keys[i].second) : nullptr);
    });
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& model = *in.models.at(keys[i]);
        for (auto h : in.plan.horizons)
            report.cells.push_back(score_cell(series[i].at(h), model, keys[i].first, keys[i].second, h));
        if (series_out) (*series_out)[keys[i]] = std::move(series[i]);
    }
    return report;
}

json published_reference() {
    json single = json::array();
    const struct {
        const char* model;
        double loss3, vol3, loss5, vol5;
    } t3[] = {
        {"univariate LSTM", 0.50, 42.61, 0.44, 36.92}, {"mvLSTM-RAN", 0.49, 42.74, 0.43, 37.65},
        {"mvLSTM-peak", 0.46, 39.23, 0.42, 34.75},     {"mvLSTM-handover", 0.44, 38.08, 0.39, 31.28},
        {"mvLSTM-all", 0.48, 39.55, 0.41, 33.23},
    };
    for (const auto& r : t3) {
        single.push_back({{"model", r.model}, {"sla_percent", 3}, {"horizon", 1}, {"loss", r.loss3}, {"volume", r.vol3}});
        single.push_back({{"model", r.model}, {"sla_percent", 5}, {"horizon", 1}, {"loss", r.loss5}, {"volume", r.vol5}});
    }
    json multi = json::array();
    const struct {
        const char* model;
        double loss[5];
    } t4[] = {
        {"univariate LSTM", {0.44, 0.61, 0.70, 0.87, 0.91}}, {"mvLSTM-RAN", {0.43, 0.49, 0.56, 0.77, 1.00}},
        {"mvLSTM-peak", {0.42, 0.66, 0.48, 0.65, 0.82}},     {"mvLSTM-handover", {0.39, 0.46, 0.57, 0.89, 1.07}},
        {"mvLSTM-all", {0.41, 0.54, 0.59, 0.69, 0.95}},
    };
    const std::size_t hs[] = {1, 2, 4, 8, 24};
    for (const auto& r : t4)
        for (std::size_t i = 0; i < 5; ++i)
            multi.push_back({{"model", r.model}, {"sla_percent", 5}, {"horizon", hs[i]}, {"loss", r.loss[i]}});
    return {{"note", "published figures for a private LTE cell (GU14); absolute values are not comparable to "
                     "synthetic runs"},
            {"single_step", single},
            {"multistep", multi}};
}

json report_to_json(const EvalReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        json j = {{"variant", to_string(c.variant)},
                  {"model", display_name(c.variant)},
                  {"sla_percent", c.sla_percent},
                  {"horizon", c.horizon},
                  {"w", c.w},
                  {"samples", c.samples},
                  {"skipped", c.skipped}};
        if (c.skipped) {
            j["skip_reason"] = c.skip_reason;
        } else {
            j["test_loss"] = c.test_loss;
            j["violation_rate_percent"] = c.violation_rate;
            j["overprovisioning_volume"] = c.volume;
            j["overprovisioning_volume_conditional"] = c.conditional_volume;
            j["mae"] = c.mae;
            j["mse"] = c.mse;
        }
        cells.push_back(std::move(j));
    }
    json calib = json::array();
    for (const auto& c : r.calibration)
        calib.push_back({{"sla_percent", c.sla_percent},
                         {"w", c.w},
                         {"val_violation_rate_percent", c.val_violation_rate},
                         {"val_volume", c.val_volume},
                         {"satisfied", c.satisfied}});
    json variants = json::array();
    for (auto v : r.variants) variants.push_back(to_string(v));
    return {{"format", "slacast-report"},
            {"version", 1},
            {"config_hash", r.config_hash},
            {"seed", r.seed},
            {"target_cell", r.target_cell},
            {"volume_unit", r.volume_unit},
            {"loss_units", "normalized"},
            {"variants", variants},
            {"sla_percents", r.sla_percents},
            {"horizons", r.horizons},
            {"calibration", calib},
            {"cells", cells},
            {"published_reference", published_reference()}};
}

EvalReport report_from_json(const json& j) {
    try {
        EvalReport r;
        r.config_hash = j.at("config_hash").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.target_cell = j.at("target_cell").get<std::string>();
        r.volume_unit = j.at("volume_unit").get<std::string>();
        for (const auto& v : j.at("variants")) r.variants.push_back(parse_variant(v.get<std::string>()));
        r.sla_percents = j.at("sla_percents").get<std::vector<int>>();
        r.horizons = j.at("horizons").get<std::vector<std::size_t>>();
        for (const auto& c : j.at("calibration"))
            r.calibration.push_back({c.at("sla_percent").get<int>(), c.at("w").get<double>(),
                                     c.at("val_violation_rate_percent").get<double>(), c.at("val_volume").get<double>(),
                                     c.at("satisfied").get<bool>()});
        for (const auto& c : j.at("cells")) {
            ReportCell cell;
            cell.variant = parse_variant(c.at("variant").get<std::string>());
            cell.sla_percent = c.at("sla_percent").get<int>();
            cell.horizon = c.at("horizon").get<std::size_t>();
            cell.w = c.at("w").get<double>();
            cell.samples = c.at("samples").get<std::size_t>();
            cell.skipped = c.at("skipped").get<bool>();
            if (cell.skipped) {
                cell.skip_reason = c.at("skip_reason").get<std::string>();
            } else {
                cell.test_loss = c.at("test_loss").get<double>();
                cell.violation_rate = c.at("violation_rate_percent").get<double>();
                cell.volume = c.at("overprovisioning_volume").get<double>();
                cell.conditional_volume = c.at("overprovisioning_volume_conditional").get<double>();
                cell.mae = c.at("mae").get<double>();
                cell.mse = c.at("mse").get<double>();
            }
            r.cells.push_back(std::move(cell));
        }
        return r;
    } catch (const json::exception& e) {
        throw DataError("bad-report-file", e.what());
    }
}

std::string single_step_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "model,sla_percent,w,test_loss,overprovisioning_volume,overprovisioning_volume_conditional,"
           "violation_rate_percent\n";
    for (auto v : r.variants)
        for (int s : r.sla_percents) {
            const auto* c = r.find(v, s, 1);
            if (c == nullptr || c->skipped) continue;
            out << display_name(v) << ',' << s << ',' << format_double(c->w) << ',' << format_double(c->test_loss)
                << ',' << format_double(c->volume) << ',' << format_double(c->conditional_volume) << ','
                << format_double(c->violation_rate) << '\n';
        }
    return out.str();
}

std::string multistep_csv(const EvalReport& r) {
    std::ostringstream out;
    out << "model,sla_percent";
    for (auto h : r.horizons) out << ",loss_h" << h;
    out << '\n';
    for (int s : r.sla_percents)
        for (auto v : r.variants) {
            out << display_name(v) << ',' << s;
            for (auto h : r.horizons) {
                const auto* c = r.find(v, s, h);
                out << ',' << (c == nullptr || c->skipped ? std::string() : format_double(c->test_loss));
            }
            out << '\n';
        }
    return out.str();
}

std::string plot_csv(const std::vector<HourStamp>& stamps, const std::vector<double>& actual,
                     const std::vector<std::pair<std::string, std::vector<double>>>& predictions) {
    std::ostringstream out;
    out << "timestamp,actual";
    for (const auto& [name, _] : predictions) out << ",pred_" << name;
    out << '\n';
    for (std::size_t t = 0; t < stamps.size(); ++t) {
        out << format_timestamp(stamps[t]) << ',' << format_double(actual[t]);
        for (const auto& [_, values] : predictions) out << ',' << format_double(values.at(t));
        out << '\n';
    }
    return out.str();
}

}  // namespace slacast
