#pragma once

namespace slacast {

/// Weight of the asymmetric absolute loss. Underprovisioning (prediction
/// below actual) costs `w` per unit, overprovisioning costs 1 per unit.
struct LossConfig {
    double w = 1.0;
    /// Violation rate this weight was calibrated for; metadata only.
    double sla_target = 0.5;

    /// Throws ConfigError("nonpositive-weight").
    void validate() const;
    bool operator==(const LossConfig&) const = default;
};

/// Loss of one error `err = prediction - actual`:
/// `w * |err|` for err <= 0, `err` otherwise.
/// Throws ConfigError("nonpositive-weight") for w <= 0.
double wmae(double err, double w);

/// Subgradient of wmae in err; 0 at err == 0.
double wmae_grad(double err, double w);

}  // namespace slacast
