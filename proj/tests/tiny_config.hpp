#pragma once

#include "slacast/run_config.hpp"

namespace testing {

/// Nine synthetic weeks, one-point grid, one fold: a full run in seconds.
inline slacast::RunConfig tiny_config() {
    using namespace slacast;
    RunConfig cfg;
    cfg.scenario.weeks = 9;
    cfg.split = {6, 2, 1};
    cfg.folds = 1;
    cfg.fold_shift_hours = 168;
    cfg.grid.hidden = {4};
    cfg.grid.learning_rate = {1e-2};
    cfg.grid.epochs = {20};
    cfg.calibration.grid = {1, 4, 16, 64};
    cfg.calibration.refine_steps = 2;
    cfg.variants = {Variant::univariate, Variant::peak, Variant::handover};
    cfg.horizons.horizons = {1, 2, 24};
    return cfg;
}

}  // namespace testing
