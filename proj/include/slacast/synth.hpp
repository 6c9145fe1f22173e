#pragma once

#include "slacast/dataset.hpp"
#include "slacast/handover.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace slacast {

/// Daily load shape of one cell: level * (1 + amplitude * cos(2*pi*(h - peak_hour)/24)).
struct DailyProfile {
    double level = 100.0;
    double amplitude = 0.6;
    double peak_hour = 20.0;
    bool operator==(const DailyProfile&) const = default;
};

/// Knobs of the synthetic multi-cell region. Spike parameters are defaults
/// chosen for this generator, not measurements of any real network.
struct ScenarioConfig {
    std::vector<CellId> cells;
    std::size_t weeks = 52;
    std::uint64_t seed = 20230401;
    /// Grid start; defaults to Monday 2022-01-03 00:00.
    HourStamp start = 455880;
    /// Per-cell overrides; cells without an entry draw a profile from the seed.
    std::map<CellId, DailyProfile> profiles;
    double weekday_weekend_ratio = 1.3;
    double trend_per_week = 0.002;
    double spike_probability = 0.1;
    double spike_magnitude = 0.35;
    /// Pearson target of F16-F19 against F10, in (0, 1).
    double rho = 0.95;
    /// Upper bound on |Pearson| of the other counters against F10.
    double nuisance_correlation = 0.5;
    /// Relative std of the multiplicative AR(1) load noise.
    double noise_scale = 0.12;
    double noise_persistence = 0.6;
    /// Share of a coupled cell's F10 that comes from its in-neighbors one
    /// hour earlier.
    double coupling_share = 0.5;
    std::string volume_unit = "GB";

    /// Throws ConfigError("invalid-scenario") naming the offending field.
    void validate() const;
};

/// Cells of the GU14 neighborhood with the default knobs.
ScenarioConfig default_scenario_config();

/// Generates every configured cell. Deterministic in (cfg, ho).
///
/// Cells listed as handover targets draw `coupling_share` of their F10 at
/// hour t from the rate-weighted mix of their in-neighbors' F10 at t - 1.
/// Throws DataError("inconsistent-handover-matrix") when `ho` names cells
/// missing from `cfg.cells`.
std::map<CellId, CellDataset> generate_region(const ScenarioConfig& cfg, const HandoverMatrix& ho);

/// F10 of a single uncoupled cell.
std::vector<double> generate_load(const ScenarioConfig& cfg, const CellId& cell);

/// The nineteen counters other than F10. F16-F19 are affine in F10 plus
/// noise scaled to hit `cfg.rho`; the rest mix independent seasonality with
/// a correlation to F10 of at most `cfg.nuisance_correlation`.
std::vector<FeatureSeries> derive_counter_features(const FeatureSeries& f10, const ScenarioConfig& cfg,
                                                   const CellId& cell);

}  // namespace slacast
