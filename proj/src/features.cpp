#include "slacast/features.hpp"

#include "slacast/error.hpp"
#include "slacast/normalizer.hpp"

#include <algorithm>
#include <cmath>

namespace slacast {

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw DataError("length-mismatch", "pearson needs two equal-length series of at least 2 values");
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double floor = kConstantEpsilon * kConstantEpsilon * n;
    if (!(saa > floor) || !(sbb > floor)) throw DataError("constant-input", "pearson of a constant series");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::map<std::string, double> correlation_with_target(const CellDataset& ds, std::vector<std::string>* skipped) {
    const auto target = ds.values(kTargetLabel);
    std::map<std::string, double> out;
    for (const auto& [label, values] : ds.all()) {
        if (label == kTargetLabel) continue;
        try {
            out[label] = pearson(values, target);
        } catch (const DataError& e) {
            if (e.kind() != "constant-input") throw;
            if (skipped) skipped->push_back(label);
        }
    }
    return out;
}

std::vector<std::string> select_ran_features(const CellDataset& train, double threshold,
                                             std::vector<std::string>* skipped) {
    std::vector<std::string> out;
    for (const auto& [label, r] : correlation_with_target(train, skipped))
        if (std::abs(r) >= threshold) out.push_back(label);
    std::sort(out.begin(), out.end(),
              [](const std::string& x, const std::string& y) { return feature_number(x) < feature_number(y); });
    return out;
}

std::set<int> default_weekend() { return {5, 6}; }

FeatureSeries peak_days_vector(const TimeGrid& grid, const std::set<int>& weekend_days) {
    FeatureSeries out{kPeakDayColumn, std::vector<double>(grid.length())};
    for (std::size_t t = 0; t < grid.length(); ++t) out.values[t] = weekend_days.contains(grid.day_of_week(t)) ? 0.0 : 1.0;
    return out;
}

PeakProfile detect_peak_hours(std::span<const double> f10, const TimeGrid& grid, double tau,
                              const std::set<int>& weekend_days) {
    if (f10.size() != grid.length()) throw DataError("length-mismatch", "series does not match its grid");
    std::size_t first = 0;
    while (first < f10.size() && grid.hour_of_day(first) != 0) ++first;
    const std::size_t days = first < f10.size() ? (f10.size() - first) / kHoursPerDay : 0;
    if (days < 2) throw DataError("too-short-series", "peak detection needs at least two full days");

    PeakProfile profile;
    profile.threshold = tau;
    profile.weekend_days = weekend_days;
    profile.days = days;
    std::array<std::size_t, 24> counts{};
    for (std::size_t d = 0; d < days; ++d) {
        const std::size_t base = first + d * kHoursPerDay;
        std::size_t best = 0;
        for (std::size_t h = 1; h < kHoursPerDay; ++h)
            if (f10[base + h] > f10[base + best]) best = h;
        ++counts[best];
    }
    for (std::size_t h = 0; h < 24; ++h) {
        profile.occurrence[h] = static_cast<double>(counts[h]) / static_cast<double>(days);
        if (profile.occurrence[h] > tau) profile.peak_hours.insert(static_cast<int>(h));
    }
    return profile;
}

FeatureSeries peak_hours_vector(const PeakProfile& profile, const TimeGrid& grid) {
    FeatureSeries out{kPeakHourColumn, std::vector<double>(grid.length())};
    for (std::size_t t = 0; t < grid.length(); ++t)
        out.values[t] = profile.peak_hours.contains(grid.hour_of_day(t)) ? 1.0 : 0.0;
    return out;
}

std::vector<double> weighted_average(const std::vector<std::pair<CellId, double>>& weights,
                                     const std::map<CellId, std::vector<double>>& series) {
    if (weights.empty()) throw DataError("empty-cluster", "no neighbors to average");
    std::vector<double> out;
    for (const auto& [cell, weight] : weights) {
        const auto it = series.find(cell);
        if (it == series.end()) throw DataError("missing-neighbor-series", "no F10 series for " + cell.str());
        if (out.empty()) out.assign(it->second.size(), 0.0);
        if (it->second.size() != out.size())
            throw DataError("length-mismatch", "neighbor " + cell.str() + " is on a different grid");
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += weight * it->second[t];
    }
    return out;
}

HandoverFeatures handover_features(const CellId& target, const std::map<CellId, std::vector<double>>& neighbor_f10,
                                   const HandoverMatrix& ho) {
    const auto in_w = ho.weights(target, HandoverDirection::incoming);
    const auto out_w = ho.weights(target, HandoverDirection::outgoing);
    if (in_w.empty() || out_w.empty())
        throw DataError("empty-cluster", target.str() + " needs listed incoming and outgoing neighbors");
    return {{kHandoverInColumn, weighted_average(in_w, neighbor_f10)},
            {kHandoverOutColumn, weighted_average(out_w, neighbor_f10)}};
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v{Variant::univariate, Variant::ran, Variant::peak, Variant::handover,
                                        Variant::all};
    return v;
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::univariate: return "univariate";
        case Variant::ran: return "ran";
        case Variant::peak: return "peak";
        case Variant::handover: return "handover";
        case Variant::all: return "all";
    }
    return "?";
}

const char* display_name(Variant v) {
    switch (v) {
        case Variant::univariate: return "univariate LSTM";
        case Variant::ran: return "mvLSTM-RAN";
        case Variant::peak: return "mvLSTM-peak";
        case Variant::handover: return "mvLSTM-handover";
        case Variant::all: return "mvLSTM-all";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    for (auto v : all_variants())
        if (name == to_string(v)) return v;
    throw ConfigError("unknown-variant", "'" + name + "' (expected univariate, ran, peak, handover or all)");
}

bool FeatureRecipe::uses_ran() const { return variant == Variant::ran || variant == Variant::all; }
bool FeatureRecipe::uses_peak() const { return variant == Variant::peak || variant == Variant::all; }
bool FeatureRecipe::uses_handover() const { return variant == Variant::handover || variant == Variant::all; }

std::vector<std::string> FeatureRecipe::columns() const {
    std::vector<std::string> out{kTargetLabel};
    if (uses_ran()) out.insert(out.end(), ran_labels.begin(), ran_labels.end());
    if (uses_peak()) {
        out.emplace_back(kPeakDayColumn);
        out.emplace_back(kPeakHourColumn);
    }
    if (uses_handover()) {
        out.emplace_back(kHandoverInColumn);
        out.emplace_back(kHandoverOutColumn);
    }
    return out;
}

bool is_boolean_column(const std::string& column) { return column == kPeakDayColumn || column == kPeakHourColumn; }

FeatureRecipe build_recipe(Variant variant, const CellDataset& train, const HandoverMatrix* ho,
                           const FeatureOptions& options) {
    FeatureRecipe recipe;
    recipe.variant = variant;
    recipe.target = train.cell();
    recipe.lookback = options.lookback;
    if (recipe.uses_ran()) recipe.ran_labels = select_ran_features(train, options.correlation_threshold);
    if (recipe.uses_peak())
        recipe.peak = detect_peak_hours(train.values(kTargetLabel), train.grid(), options.peak_threshold,
                                        options.weekend_days);
    if (recipe.uses_handover()) {
        if (ho == nullptr)
            throw ConfigError("missing-handover", std::string(to_string(variant)) + " variant needs handover rates");
        recipe.incoming_weights = ho->weights(train.cell(), HandoverDirection::incoming);
        recipe.outgoing_weights = ho->weights(train.cell(), HandoverDirection::outgoing);
        if (recipe.incoming_weights.empty() || recipe.outgoing_weights.empty())
            throw DataError("empty-cluster", train.cell().str() + " has no listed handover neighbors");
    }
    return recipe;
}

std::size_t FeatureTable::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DataError("unknown-feature-label", "table has no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

FeatureTable FeatureTable::rows(std::size_t offset, std::size_t count) const {
    return {grid.slice(offset, count), columns,
            values.middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(count))};
}

FeatureTable assemble_inputs(const FeatureRecipe& recipe, const CellDataset& ds,
                             const std::map<CellId, CellDataset>* region) {
    FeatureTable table{ds.grid(), recipe.columns(), {}};
    table.values.resize(static_cast<Eigen::Index>(ds.length()), static_cast<Eigen::Index>(table.columns.size()));
    auto put = [&](std::size_t col, std::span<const double> v) {
        for (std::size_t t = 0; t < v.size(); ++t)
            table.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(col)) = v[t];
    };
    std::size_t col = 0;
    put(col++, ds.values(kTargetLabel));
    if (recipe.uses_ran())
        for (const auto& label : recipe.ran_labels) put(col++, ds.values(label));
    if (recipe.uses_peak()) {
        if (!recipe.peak) throw DataError("bad-recipe", "peak variant without a peak profile");
        put(col++, peak_days_vector(ds.grid(), recipe.peak->weekend_days).values);
        put(col++, peak_hours_vector(*recipe.peak, ds.grid()).values);
    }
    if (recipe.uses_handover()) {
        std::map<CellId, std::vector<double>> neighbors;
        for (const auto* weights : {&recipe.incoming_weights, &recipe.outgoing_weights}) {
            for (const auto& [cell, _] : *weights) {
                if (neighbors.contains(cell)) continue;
                if (region == nullptr || !region->contains(cell))
                    throw DataError("missing-neighbor-series", "no dataset for neighbor " + cell.str());
                const auto& nds = region->at(cell);
                if (!(nds.grid() == ds.grid()))
                    throw DataError("length-mismatch", "neighbor " + cell.str() + " is on a different grid");
                const auto v = nds.values(kTargetLabel);
                neighbors.emplace(cell, std::vector<double>(v.begin(), v.end()));
            }
        }
        put(col++, weighted_average(recipe.incoming_weights, neighbors));
        put(col++, weighted_average(recipe.outgoing_weights, neighbors));
    }
    return table;
}

}  // namespace slacast
