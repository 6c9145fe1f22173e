#include "slacast/metrics.hpp"

#include "slacast/error.hpp"
#include "slacast/loss.hpp"

#include <cmath>

namespace slacast {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size())
        throw DataError("length-mismatch", std::to_string(pred.size()) + " predictions for " +
                                               std::to_string(actual.size()) + " actuals");
    if (pred.empty()) throw DataError("empty", "no predictions to score");
}

}  // namespace

double sla_violation_rate(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < pred.size(); ++t)
        if (pred[t] - actual[t] < 0.0) ++violations;
    return 100.0 * static_cast<double>(violations) / static_cast<double>(pred.size());
}

Overprovisioning overprovisioning_volume(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < pred.size(); ++t) {
        const double err = pred[t] - actual[t];
        if (err > 0.0) {
            sum += err;
            ++count;
        }
    }
    return {sum / static_cast<double>(pred.size()), count > 0 ? sum / static_cast<double>(count) : 0.0};
}

double test_loss(std::span<const double> pred, std::span<const double> actual, const Moments& target, double w) {
    check_pair(pred, actual);
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t) {
        const double p = (pred[t] - target.mean) / target.std;
        const double a = (actual[t] - target.mean) / target.std;
        sum += wmae(p - a, w);
    }
    return sum / static_cast<double>(pred.size());
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t) sum += std::abs(pred[t] - actual[t]);
    return sum / static_cast<double>(pred.size());
}

double mean_squared_error(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t) sum += (pred[t] - actual[t]) * (pred[t] - actual[t]);
    return sum / static_cast<double>(pred.size());
}

}  // namespace slacast
