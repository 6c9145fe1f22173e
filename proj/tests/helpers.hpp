#pragma once

#include "slacast/dataset.hpp"
#include "slacast/features.hpp"
#include "slacast/model.hpp"
#include "slacast/handover.hpp"
#include "slacast/rng.hpp"
#include "slacast/synth.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace testing {

using namespace slacast;

// Monday 2022-01-03 00:00.
inline constexpr HourStamp kMonday = 455880;

/// Every feature filled by `fn(label_number, hour_index)`.
inline CellDataset make_dataset(std::size_t hours, const std::function<double(int, std::size_t)>& fn,
                                HourStamp start = kMonday, CellId cell = CellId("GU", 1, 4)) {
    std::map<std::string, std::vector<double>> series;
    for (int f = 1; f <= 20; ++f) {
        std::vector<double> v(hours);
        for (std::size_t t = 0; t < hours; ++t) v[t] = fn(f, t);
        series[feature_label(f)] = std::move(v);
    }
    return CellDataset(cell, TimeGrid(start, hours), std::move(series));
}

/// Gaussian noise dataset, distinct per feature.
inline CellDataset noise_dataset(std::size_t hours, std::uint64_t seed) {
    auto rng = Rng::stream(seed, "noise-dataset");
    std::vector<std::vector<double>> cols(20, std::vector<double>(hours));
    for (auto& c : cols)
        for (auto& x : c) x = rng.normal();
    return make_dataset(hours, [&](int f, std::size_t t) { return cols[f - 1][t]; });
}

/// The default region, generated once per process.
inline const std::map<CellId, CellDataset>& default_region() {
    static const auto region = generate_region(default_scenario_config(), table2_handover_matrix());
    return region;
}

inline const CellDataset& default_target() { return default_region().at(CellId::parse("GU14")); }

/// Reference Pearson correlation by the textbook two-pass formula.
inline double pearson_reference(const std::vector<double>& a, const std::vector<double>& b) {
    long double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    long double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return static_cast<double>(sab / std::sqrt(saa * sbb));
}

inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
    std::vector<double> a(x.begin(), x.end() - static_cast<std::ptrdiff_t>(lag));
    std::vector<double> b(x.begin() + static_cast<std::ptrdiff_t>(lag), x.end());
    return pearson_reference(a, b);
}

/// Untrained network over `variant` of the default target, normalized on
/// the training weeks.
inline ForecastModel random_model(Variant variant, std::uint64_t seed, std::size_t hidden = 4) {
    const auto& target = default_target();
    const auto train = target.slice(0, 6720);
    const auto ho = table2_handover_matrix();
    ForecastModel m;
    m.recipe = build_recipe(variant, train, &ho);
    m.spec = {m.recipe.width(), hidden, 1, m.recipe.lookback};
    m.params = LstmParams::random(m.spec, seed);
    const auto table = assemble_inputs(m.recipe, target, &default_region());
    m.normalizer = fit_column_normalizer(m.recipe.columns(), table.values.topRows(6720));
    return m;
}

}  // namespace testing
