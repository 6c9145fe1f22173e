#include "slacast/calibration.hpp"

#include "slacast/error.hpp"
#include "slacast/loss.hpp"
#include "slacast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace slacast {

namespace {

class TrialCache {
public:
    explicit TrialCache(const WeightEvaluator& evaluate) : evaluate_(evaluate) {}

    void run(const std::vector<double>& ws, std::size_t jobs) {
        std::vector<double> todo;
        for (double w : ws)
            if (!done_.contains(w) && std::find(todo.begin(), todo.end(), w) == todo.end()) todo.push_back(w);
        std::vector<WeightTrial> results(todo.size());
        parallel_for(todo.size(), jobs, [&](std::size_t i) {
            results[i] = evaluate_(todo[i]);
            results[i].w = todo[i];
        });
        for (std::size_t i = 0; i < todo.size(); ++i) {
            done_.emplace(todo[i], results[i]);
            trace_.push_back(results[i]);
        }
    }

    const WeightTrial& get(double w, std::size_t jobs) {
        run({w}, jobs);
        return done_.at(w);
    }

    [[nodiscard]] const std::vector<WeightTrial>& trace() const { return trace_; }

private:
    const WeightEvaluator& evaluate_;
    std::map<double, WeightTrial> done_;
    std::vector<WeightTrial> trace_;
};

}  // namespace

double oracle_weight(double p) { return (1.0 - p) / p; }

CalibrationResult calibrate_weight(double p, const WeightEvaluator& evaluate, const CalibrationSearch& search,
                                   std::size_t jobs) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("invalid-target", "target violation rate must lie in (0, 1)");
    if (search.grid.empty()) throw ConfigError("empty-search-range", "no candidate weights");
    for (std::size_t i = 0; i < search.grid.size(); ++i) {
        if (!(search.grid[i] > 0.0)) throw ConfigError("nonpositive-weight", "candidate weights must be positive");
        if (i > 0 && !(search.grid[i] > search.grid[i - 1]))
            throw ConfigError("empty-search-range", "candidate weights must be strictly ascending");
    }
    if (std::find(search.grid.begin(), search.grid.end(), 1.0) == search.grid.end())
        throw ConfigError("empty-search-range", "the search range must include w = 1");

    TrialCache cache(evaluate);
    cache.run(search.grid, jobs);

    // First adjacent pair whose violation rates straddle the target.
    std::size_t bracket = search.grid.size();
    for (std::size_t i = 0; i + 1 < search.grid.size(); ++i) {
        if (cache.get(search.grid[i], jobs).violation_rate > p && cache.get(search.grid[i + 1], jobs).violation_rate <= p) {
            bracket = i;
            break;
        }
    }
    if (bracket < search.grid.size() && search.refine_steps > 0) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = std::log(search.grid[bracket]);
        double b = std::log(search.grid[bracket + 1]);
        auto score = [&](double u) { return std::abs(cache.get(std::exp(u), jobs).violation_rate - p); };
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        cache.run({std::exp(x1), std::exp(x2)}, std::min<std::size_t>(jobs, search.refine_steps));
        for (std::size_t used = 2; used < search.refine_steps; ++used) {
            if (score(x1) <= score(x2)) {
                b = x2;
                x2 = x1;
                x1 = b - inv_phi * (b - a);
                score(x1);
            } else {
                a = x1;
                x1 = x2;
                x2 = a + inv_phi * (b - a);
                score(x2);
            }
        }
    }

    CalibrationResult result;
    result.target_rate = p;
    result.trace = cache.trace();
    const WeightTrial* chosen = nullptr;
    for (const auto& t : result.trace) {
        if (t.violation_rate > p + search.tolerance) continue;
        if (chosen == nullptr || t.volume < chosen->volume || (t.volume == chosen->volume && t.w < chosen->w))
            chosen = &t;
    }
    result.satisfied = chosen != nullptr;
    if (chosen == nullptr) {
        for (const auto& t : result.trace)
            if (chosen == nullptr || t.violation_rate < chosen->violation_rate ||
                (t.violation_rate == chosen->violation_rate && t.w < chosen->w))
                chosen = &t;
    }
    result.w = chosen->w;
    result.violation_rate = chosen->violation_rate;
    result.volume = chosen->volume;
    return result;
}

ConstantOracle constant_predictor_oracle(std::span<const double> targets, double w) {
    if (targets.empty()) throw DataError("empty", "oracle needs at least one sample");
    if (!(w > 0.0)) throw ConfigError("nonpositive-weight", "loss weight must be positive");
    std::vector<double> x(targets.begin(), targets.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

    ConstantOracle best;
    bool have = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && x[k] == x[k - 1]) continue;
        const double c = x[k];
        // x[0..lo) < c, x[hi..n) > c.
        const auto lo = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), c) - x.begin());
        const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), c) - x.begin());
        const double below = static_cast<double>(lo) * c - prefix[lo];
        const double above = (prefix[n] - prefix[hi]) - static_cast<double>(n - hi) * c;
        const double loss = (below + w * above) / static_cast<double>(n);
        const double tie = 1e-12 * (std::abs(loss) + 1.0);
        if (!have || loss < best.loss - tie) {
            best = {c, static_cast<double>(n - hi) / static_cast<double>(n), loss};
            have = true;
        }
    }
    return best;
}

}  // namespace slacast
