#include "slacast/loss.hpp"

#include "slacast/error.hpp"

#include <cmath>

namespace slacast {

void LossConfig::validate() const {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("nonpositive-weight", "loss weight must be positive");
}

double wmae(double err, double w) {
    if (!(w > 0.0)) throw ConfigError("nonpositive-weight", "loss weight must be positive");
    return err <= 0.0 ? w * -err : err;
}

double wmae_grad(double err, double w) {
    if (err < 0.0) return -w;
    if (err > 0.0) return 1.0;
    return 0.0;
}

}  // namespace slacast
