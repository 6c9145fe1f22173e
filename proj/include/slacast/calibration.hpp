#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace slacast {

/// Validation outcome of a model trained with one loss weight.
struct WeightTrial {
    double w = 1.0;
    double violation_rate = 0.0;  // fraction
    double volume = 0.0;          // unconditional mean overprovisioning, raw units
    double conditional_volume = 0.0;
    bool operator==(const WeightTrial&) const = default;
};

struct CalibrationResult {
    double target_rate = 0.05;  // fraction
    double w = 1.0;
    double violation_rate = 0.0;
    double volume = 0.0;
    bool satisfied = false;
    std::vector<WeightTrial> trace;  // in evaluation order
};

struct CalibrationSearch {
    /// Coarse grid, ascending; must contain 1.
    std::vector<double> grid{1, 2, 4, 8, 16, 32, 64};
    /// Extra evaluations of the golden-section refinement.
    std::size_t refine_steps = 4;
    /// Slack on the rate constraint, as a fraction (0.015 = 1.5 points).
    double tolerance = 0.015;
};

/// Trains with weight w and measures validation metrics. Must be safe to
/// call concurrently when jobs > 1.
using WeightEvaluator = std::function<WeightTrial(double w)>;

/// Line search for the loss weight.
///
/// Evaluates the coarse grid, then runs golden-section refinement in log w
/// on |rate - p| inside the first grid pair whose rates straddle p. Among
/// all trials with rate <= p + tolerance the one with the smallest volume
/// wins (smaller w on ties); with no such trial the lowest-rate one is
/// returned with `satisfied = false`.
///
/// Errors: ConfigError("empty-search-range"), ("invalid-target").
CalibrationResult calibrate_weight(double p, const WeightEvaluator& evaluate, const CalibrationSearch& search = {},
                                   std::size_t jobs = 1);

/// Optimal constant prediction under wmae and its empirical violation rate.
struct ConstantOracle {
    double c = 0.0;
    double violation_rate = 0.0;  // fraction of targets strictly above c
    double loss = 0.0;
};

/// Scans every sample value as the candidate constant and keeps the one with
/// the lowest mean wmae (smallest value on ties).
ConstantOracle constant_predictor_oracle(std::span<const double> targets, double w);

/// Weight whose constant-predictor violation rate is p: (1 - p) / p.
double oracle_weight(double p);

}  // namespace slacast
