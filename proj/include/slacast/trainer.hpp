#pragma once

#include "slacast/folds.hpp"
#include "slacast/loss.hpp"
#include "slacast/lstm.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace slacast {

/// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
struct TrainConfig {
    double learning_rate = 3e-3;
    std::size_t epochs = 20;
    double l2 = 0.0;
    std::size_t batch_size = 64;
    std::uint64_t seed = 1;

    /// Throws ConfigError("invalid-train-config").
    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
    LstmParams params;
    std::vector<double> train_curve;  // mean batch wmae per epoch
    std::vector<double> val_curve;    // empty without validation windows
};

/// Minimizes mean wmae + l2 * ||theta||^2 with Adam over shuffled
/// mini-batches. Deterministic for a fixed seed.
/// Throws DataError("no-samples") and DivergenceError("divergence") on a
/// non-finite loss.
TrainResult train(const LstmSpec& spec, const WindowSet& train_windows, const WindowSet* val_windows,
                  const TrainConfig& config, const LossConfig& loss);

/// Mean wmae of the network over every window of `windows`.
double mean_loss(const LstmParams& params, const WindowSet& windows, double w);

struct GradientCheckOptions {
    double step = 1e-5;
    std::size_t samples = 4;
    double l2 = 1e-3;
    /// Test hook applied to the analytic gradient before comparison.
    std::function<void(Eigen::VectorXd&)> tamper;
};

/// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-7),
/// where numeric is a central difference of the objective on random windows.
double check_gradients(const LstmSpec& spec, const LossConfig& loss, std::uint64_t seed,
                       const GradientCheckOptions& options = {});

struct GridPoint {
    LstmSpec spec;
    TrainConfig config;

    /// Stable text key; ties in grid search go to the smallest key.
    [[nodiscard]] std::string encode() const;
};

struct GridScore {
    GridPoint point;
    double mean_val_loss = std::numeric_limits<double>::infinity();
    std::vector<double> fold_losses;  // +inf for diverged folds
};

struct GridSearchResult {
    GridPoint best;
    std::vector<GridScore> scores;  // in grid order
};

/// Trains one model for (grid point, fold) and returns its validation loss;
/// may throw DivergenceError, which scores that fold +inf.
using FoldEvaluator = std::function<double(const GridPoint&, const Fold&)>;

/// Mean validation loss over the plan's folds per point; minimizer wins.
/// `jobs` workers evaluate (point, fold) pairs; the result does not depend
/// on it. Throws DivergenceError("all-diverged") and ConfigError("empty-grid").
GridSearchResult grid_search(const std::vector<GridPoint>& grid, const FoldPlan& plan,
                             const FoldEvaluator& evaluate, std::size_t jobs = 1);

/// Standard evaluator: normalizes each fold on its own training rows, trains
/// and scores mean wmae on the validation rows. `columns` names the frame
/// columns (column 0 is the target); calendar columns bypass normalization.
FoldEvaluator frame_fold_evaluator(const Frame& raw, std::vector<std::string> columns, const LossConfig& loss);

}  // namespace slacast
