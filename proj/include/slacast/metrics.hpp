#pragma once

#include "slacast/normalizer.hpp"

#include <span>

namespace slacast {

/// Percentage of instants with pred < actual (exact hits do not count).
/// Errors: DataError("length-mismatch"), ("empty").
double sla_violation_rate(std::span<const double> pred, std::span<const double> actual);

struct Overprovisioning {
    double unconditional = 0.0;  // mean of max(pred - actual, 0) over all instants
    double conditional = 0.0;    // mean over overprovisioned instants only, 0 if none
};

Overprovisioning overprovisioning_volume(std::span<const double> pred, std::span<const double> actual);

/// Mean wmae after z-scoring both series with `target` moments.
double test_loss(std::span<const double> pred, std::span<const double> actual, const Moments& target, double w);

double mean_absolute_error(std::span<const double> pred, std::span<const double> actual);
double mean_squared_error(std::span<const double> pred, std::span<const double> actual);

}  // namespace slacast
