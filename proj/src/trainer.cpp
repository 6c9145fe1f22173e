#include "slacast/trainer.hpp"

#include "slacast/error.hpp"
#include "slacast/model.hpp"
#include "slacast/parallel.hpp"
#include "slacast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace slacast {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || epochs == 0 || batch_size == 0 || !(l2 >= 0.0))
        throw ConfigError("invalid-train-config", "learning rate, epochs and batch size must be positive, l2 >= 0");
}

double mean_loss(const LstmParams& params, const WindowSet& windows, double w) {
    if (windows.empty()) throw DataError("no-samples", "no windows to score");
    std::vector<std::size_t> all(windows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto pred = forward_batch(params, windows, all);
    double sum = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t) sum += wmae(pred[t] - windows.target(t), w);
    return sum / static_cast<double>(pred.size());
}

TrainResult train(const LstmSpec& spec, const WindowSet& train_windows, const WindowSet* val_windows,
                  const TrainConfig& config, const LossConfig& loss) {
    spec.validate();
    config.validate();
    loss.validate();
    if (train_windows.empty()) throw DataError("no-samples", "training needs at least one window");

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;

    TrainResult result{LstmParams::random(spec, config.seed), {}, {}};
    auto& theta = result.params.flat();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd grad;

    std::vector<std::size_t> order(train_windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = Rng::stream(config.seed, "trainer/shuffle");
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t n = std::min(config.batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, n);
            const double value = objective(result.params, train_windows, batch, loss.w, config.l2, &grad);
            if (!std::isfinite(value) || !grad.allFinite())
                throw DivergenceError("divergence", "non-finite loss at epoch " + std::to_string(epoch + 1) +
                                                        ", step " + std::to_string(step + 1));
            epoch_loss += value - config.l2 * theta.squaredNorm();
            ++batches;
            ++step;
            m = kBeta1 * m + (1.0 - kBeta1) * grad;
            v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
            const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            theta.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
        }
        result.train_curve.push_back(epoch_loss / static_cast<double>(batches));
        if (!theta.allFinite())
            throw DivergenceError("divergence", "non-finite parameters after epoch " + std::to_string(epoch + 1));
        if (val_windows != nullptr && !val_windows->empty()) {
            const double val = mean_loss(result.params, *val_windows, loss.w);
            if (!std::isfinite(val))
                throw DivergenceError("divergence", "non-finite validation loss at epoch " + std::to_string(epoch + 1));
            result.val_curve.push_back(val);
        }
    }
    return result;
}

double check_gradients(const LstmSpec& spec, const LossConfig& loss, std::uint64_t seed,
                       const GradientCheckOptions& options) {
    spec.validate();
    loss.validate();
    auto rng = Rng::stream(seed, "gradcheck/data");
    const std::size_t rows = spec.lookback + options.samples;
    std::vector<std::size_t> idx(options.samples);
    std::iota(idx.begin(), idx.end(), std::size_t{0});

    // Draw data until no sample error sits near the kink of the loss.
    for (int attempt = 0; attempt < 100; ++attempt) {
        Frame frame(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(spec.input_width));
        for (Eigen::Index r = 0; r < frame.rows(); ++r)
            for (Eigen::Index c = 0; c < frame.cols(); ++c) frame(r, c) = rng.normal();
        const WindowSet windows(frame, spec.lookback, 0);
        LstmParams params = LstmParams::random(spec, seed + static_cast<std::uint64_t>(attempt));
        const auto pred = forward_batch(params, windows, idx);
        bool near_kink = false;
        for (std::size_t i = 0; i < idx.size(); ++i)
            near_kink = near_kink || std::abs(pred[i] - windows.target(idx[i])) < 1e-3;
        if (near_kink) continue;

        Eigen::VectorXd analytic;
        objective(params, windows, idx, loss.w, options.l2, &analytic);
        if (options.tamper) options.tamper(analytic);

        double worst = 0.0;
        auto& theta = params.flat();
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            const double saved = theta[k];
            theta[k] = saved + options.step;
            const double up = objective(params, windows, idx, loss.w, options.l2, nullptr);
            theta[k] = saved - options.step;
            const double down = objective(params, windows, idx, loss.w, options.l2, nullptr);
            theta[k] = saved;
            const double numeric = (up - down) / (2.0 * options.step);
            const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
            worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
        }
        return worst;
    }
    throw DataError("gradient-check", "could not draw a kink-free evaluation point");
}

std::string GridPoint::encode() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "H=%04zu|layers=%02zu|L=%03zu|D=%03zu|lr=%.6e|epochs=%05zu|l2=%.6e|batch=%05zu|seed=%020llu",
                  spec.hidden, spec.layers, spec.lookback, spec.input_width, config.learning_rate, config.epochs,
                  config.l2, config.batch_size, static_cast<unsigned long long>(config.seed));
    return buf;
}

GridSearchResult grid_search(const std::vector<GridPoint>& grid, const FoldPlan& plan, const FoldEvaluator& evaluate,
                             std::size_t jobs) {
    if (grid.empty()) throw ConfigError("empty-grid", "grid search needs at least one point");
    if (plan.folds.empty()) throw ConfigError("infeasible-plan", "fold plan is empty");
    const std::size_t k = plan.folds.size();
    std::vector<double> losses(grid.size() * k, std::numeric_limits<double>::infinity());
    parallel_for(losses.size(), jobs, [&](std::size_t task) {
        try {
            const double value = evaluate(grid[task / k], plan.folds[task % k]);
            if (std::isfinite(value)) losses[task] = value;
        } catch (const DivergenceError&) {
            // stays +inf
        }
    });

    GridSearchResult result;
    std::size_t best = grid.size();
    for (std::size_t p = 0; p < grid.size(); ++p) {
        GridScore score{grid[p], 0.0, {losses.begin() + static_cast<std::ptrdiff_t>(p * k),
                                       losses.begin() + static_cast<std::ptrdiff_t>((p + 1) * k)}};
        for (double l : score.fold_losses) score.mean_val_loss += l;
        score.mean_val_loss /= static_cast<double>(k);
        if (std::isfinite(score.mean_val_loss)) {
            if (best == grid.size() || score.mean_val_loss < result.scores[best].mean_val_loss ||
                (score.mean_val_loss == result.scores[best].mean_val_loss &&
                 score.point.encode() < result.scores[best].point.encode()))
                best = p;
        }
        result.scores.push_back(std::move(score));
    }
    if (best == grid.size()) throw DivergenceError("all-diverged", "every grid point diverged on some fold");
    result.best = grid[best];
    return result;
}

FoldEvaluator frame_fold_evaluator(const Frame& raw, std::vector<std::string> columns, const LossConfig& loss) {
    return [raw, columns = std::move(columns), loss](const GridPoint& point, const Fold& fold) {
        const Frame train_raw = raw.middleRows(static_cast<Eigen::Index>(fold.train.begin),
                                               static_cast<Eigen::Index>(fold.train.size()));
        const Normalizer norm = fit_column_normalizer(columns, train_raw);
        const Frame all = normalize_inputs(norm, columns, raw);
        const std::size_t L = point.spec.lookback;
        if (fold.val.begin < L) throw ConfigError("infeasible-plan", "validation block starts inside the lookback");
        // Validation windows borrow the preceding `L` hours as context.
        const WindowSet train_w(all.middleRows(static_cast<Eigen::Index>(fold.train.begin),
                                               static_cast<Eigen::Index>(fold.train.size())),
                                L);
        const WindowSet val_w(all.middleRows(static_cast<Eigen::Index>(fold.val.begin - L),
                                             static_cast<Eigen::Index>(fold.val.size() + L)),
                              L);
        const auto result = train(point.spec, train_w, nullptr, point.config, loss);
        return mean_loss(result.params, val_w, loss.w);
    };
}

}  // namespace slacast
