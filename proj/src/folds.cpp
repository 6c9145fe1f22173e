#include "slacast/folds.hpp"

#include "slacast/error.hpp"

namespace slacast {

FoldPlan make_folds(const TimeGrid& grid, std::size_t k, std::size_t shift_hours) {
    if (k == 0 || shift_hours == 0) throw ConfigError("infeasible-plan", "need K >= 1 and a positive shift");
    const std::size_t total = grid.length();
    if (total <= k * shift_hours)
        throw ConfigError("infeasible-plan", std::to_string(k) + " folds shifted by " + std::to_string(shift_hours) +
                                                 " hours leave no training data in " + std::to_string(total) +
                                                 " hours");
    const std::size_t train_len = total - k * shift_hours;
    FoldPlan plan;
    plan.shift_hours = shift_hours;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t begin = i * shift_hours;
        plan.folds.push_back({{begin, begin + train_len}, {begin + train_len, begin + train_len + shift_hours}});
    }
    return plan;
}

}  // namespace slacast
