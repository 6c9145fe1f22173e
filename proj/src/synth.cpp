#include "slacast/synth.hpp"

#include "slacast/error.hpp"
#include "slacast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slacast {

namespace {

struct CounterScale {
    double mean;
    double sd;
};

// Typical magnitudes of the twenty counters, indexed by label number - 1.
constexpr CounterScale kCounterScales[kFeatureCount] = {
    {4000, 900},  // F1 E-RAB setup attempts
    {99.2, 0.3},  // F2 RACH success rate %
    {3.1, 0.4},   // F3 RACH timing advance
    {5200, 1100}, // F4 RRC attempts
    {4800, 1000}, // F5 S1 signalling attempts
    {38, 7},      // F6 DL PDCP cell throughput
    {6.5, 1.3},   // F7 UL PDCP cell throughput
    {21, 4},      // F8 DL PDCP user throughput
    {2.4, 0.5},   // F9 UL PDCP user throughput
    {0, 1},       // F10 generated separately
    {11, 2.5},    // F11 UL volume
    {-108, 2},    // F12 UL RSSI PUCCH
    {-96, 3},     // F13 UL RSRP PUSCH
    {-99, 3},     // F14 UL RSRP PUCCH
    {10.5, 0.8},  // F15 CQI
    {42, 9},      // F16 active DL users
    {36, 8},      // F17 active UL users
    {120, 25},    // F18 RRC connected users
    {55, 12},     // F19 DL PRB utilisation
    {30, 7},      // F20 UL PRB utilisation
};

bool is_correlated_counter(int n) { return n >= 16 && n <= 19; }

std::vector<double> standardized(std::span<const double> v) {
    const auto n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = sd > 0 ? (v[i] - mean) / sd : 0.0;
    return out;
}

// Removes the component of `e` along the standardized series `z`, then
// rescales to unit population variance.
std::vector<double> orthogonal_unit_noise(std::vector<double> e, const std::vector<double>& z) {
    e = standardized(e);
    double cov = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) cov += e[i] * z[i];
    cov /= static_cast<double>(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] -= cov * z[i];
    return standardized(e);
}

DailyProfile draw_profile(const ScenarioConfig& cfg, const CellId& cell) {
    if (const auto it = cfg.profiles.find(cell); it != cfg.profiles.end()) return it->second;
    auto rng = Rng::stream(cfg.seed, "profile/" + cell.str());
    DailyProfile p;
    p.level = rng.uniform(60.0, 140.0);
    p.amplitude = rng.uniform(0.45, 0.7);
    p.peak_hour = rng.uniform(18.5, 21.5);
    return p;
}

}  // namespace

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid-scenario", what); };
    if (cells.empty()) fail("cells must not be empty");
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("duplicate cell");
    if (weeks < 2) fail("weeks must be at least 2");
    if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
    if (!(nuisance_correlation >= 0.0 && nuisance_correlation < 1.0))
        fail("nuisance_correlation must lie in [0, 1)");
    if (!(spike_probability >= 0.0 && spike_probability <= 1.0)) fail("spike_probability must lie in [0, 1]");
    if (!(spike_magnitude >= 0.0)) fail("spike_magnitude must be non-negative");
    if (!(weekday_weekend_ratio > 0.0)) fail("weekday_weekend_ratio must be positive");
    if (!(noise_scale >= 0.0)) fail("noise_scale must be non-negative");
    if (!(noise_persistence >= 0.0 && noise_persistence < 1.0)) fail("noise_persistence must lie in [0, 1)");
    if (!(coupling_share >= 0.0 && coupling_share < 1.0)) fail("coupling_share must lie in [0, 1)");
    if (!std::isfinite(trend_per_week)) fail("trend_per_week must be finite");
    for (const auto& [cell, p] : profiles)
        if (!(p.level > 0.0) || !(p.amplitude >= 0.0 && p.amplitude < 1.0))
            fail("profile of " + cell.str() + " needs level > 0 and amplitude in [0, 1)");
}

ScenarioConfig default_scenario_config() {
    ScenarioConfig cfg;
    const auto ho = table2_handover_matrix();
    const auto cells = ho.cells();
    cfg.cells.assign(cells.begin(), cells.end());
    cfg.profiles[CellId::parse("GU14")] = DailyProfile{150.0, 0.6, 20.0};
    return cfg;
}

std::vector<double> generate_load(const ScenarioConfig& cfg, const CellId& cell) {
    const DailyProfile profile = draw_profile(cfg, cell);
    auto noise_rng = Rng::stream(cfg.seed, "load/" + cell.str());
    auto spike_rng = Rng::stream(cfg.seed, "spike/" + cell.str());
    const std::size_t length = cfg.weeks * kHoursPerWeek;
    const double innovation = cfg.noise_scale * std::sqrt(1.0 - cfg.noise_persistence * cfg.noise_persistence);
    const int peak = static_cast<int>(std::lround(profile.peak_hour)) % 24;

    std::vector<double> out(length);
    double e = cfg.noise_scale * noise_rng.normal();
    for (std::size_t t = 0; t < length; ++t) {
        const HourStamp stamp = cfg.start + static_cast<HourStamp>(t);
        const int h = hour_of_day(stamp);
        const bool weekday = day_of_week(stamp) < 5;
        const double week = static_cast<double>(t) / static_cast<double>(kHoursPerWeek);
        double base = profile.level * (1.0 + cfg.trend_per_week * week) * (weekday ? cfg.weekday_weekend_ratio : 1.0) *
                      (1.0 + profile.amplitude * std::cos(2.0 * std::numbers::pi * (h - profile.peak_hour) / 24.0));
        const int dist = std::min((h - peak + 24) % 24, (peak - h + 24) % 24);
        // Draw every hour so the stream position never depends on the calendar.
        const double u = spike_rng.uniform();
        const double size = spike_rng.uniform(0.5, 1.5);
        if (dist <= 1 && u < cfg.spike_probability) base *= 1.0 + cfg.spike_magnitude * size;
        if (t > 0) e = cfg.noise_persistence * e + innovation * noise_rng.normal();
        out[t] = base * (1.0 + e);
    }
    return out;
}

std::vector<FeatureSeries> derive_counter_features(const FeatureSeries& f10, const ScenarioConfig& cfg,
                                                   const CellId& cell) {
    const auto z = standardized(f10.values);
    const std::size_t n = z.size();
    std::vector<FeatureSeries> out;
    for (int number = 1; number <= kFeatureCount; ++number) {
        if (number == 10) continue;
        const std::string label = feature_label(number);
        auto rng = Rng::stream(cfg.seed, "counter/" + cell.str() + "/" + label);
        double rho = cfg.rho;
        std::vector<double> e(n);
        if (is_correlated_counter(number)) {
            for (auto& x : e) x = rng.normal();
        } else {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            rho = sign * cfg.nuisance_correlation * rng.uniform();
            const double phase = rng.uniform(0.0, 24.0);
            const double amplitude = rng.uniform(0.3, 1.2);
            double ar = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                ar = 0.8 * ar + 0.6 * rng.normal();
                e[t] = amplitude * std::cos(2.0 * std::numbers::pi * (static_cast<double>(t % 24) - phase) / 24.0) + ar;
            }
        }
        const auto noise = orthogonal_unit_noise(std::move(e), z);
        const double mix = std::sqrt(1.0 - rho * rho);
        const auto scale = kCounterScales[number - 1];
        FeatureSeries s{label, std::vector<double>(n)};
        for (std::size_t t = 0; t < n; ++t) s.values[t] = scale.mean + scale.sd * (rho * z[t] + mix * noise[t]);
        out.push_back(std::move(s));
    }
    return out;
}

std::map<CellId, CellDataset> generate_region(const ScenarioConfig& cfg, const HandoverMatrix& ho) {
    cfg.validate();
    for (const auto& cell : ho.cells())
        if (std::find(cfg.cells.begin(), cfg.cells.end(), cell) == cfg.cells.end())
            throw DataError("inconsistent-handover-matrix", cell.str() + " is in the handover matrix but not the scenario");

    const std::size_t length = cfg.weeks * kHoursPerWeek;
    std::map<CellId, std::vector<double>> f10;
    for (const auto& cell : cfg.cells) f10[cell] = generate_load(cfg, cell);

    // Coupled cells take part of their load from in-neighbors one hour back.
    const double s = cfg.coupling_share;
    std::map<CellId, std::vector<std::pair<CellId, double>>> coupling;
    for (const auto& cell : cfg.cells) {
        auto w = ho.weights(cell, HandoverDirection::incoming);
        if (!w.empty() && s > 0.0) coupling.emplace(cell, std::move(w));
    }
    if (!coupling.empty()) {
        auto own = f10;
        for (std::size_t t = 1; t < length; ++t) {
            for (const auto& [cell, weights] : coupling) {
                double mix = 0.0;
                for (const auto& [neighbor, weight] : weights) mix += weight * f10.at(neighbor)[t - 1];
                f10[cell][t] = (1.0 - s) * own.at(cell)[t] + s * mix;
            }
        }
    }

    std::map<CellId, CellDataset> region;
    const TimeGrid grid(cfg.start, length);
    for (const auto& cell : cfg.cells) {
        std::map<std::string, std::vector<double>> series;
        FeatureSeries target{kTargetLabel, std::move(f10[cell])};
        for (auto& fs : derive_counter_features(target, cfg, cell)) series.emplace(fs.label, std::move(fs.values));
        series.emplace(kTargetLabel, std::move(target.values));
        region.emplace(cell, CellDataset(cell, grid, std::move(series)));
    }
    return region;
}

}  // namespace slacast
