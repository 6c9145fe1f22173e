#include "helpers.hpp"

#include "slacast/calibration.hpp"
#include "slacast/error.hpp"
#include "slacast/loss.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace slacast;

namespace {

std::vector<double> one_to(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = double(i + 1);
    return v;
}

/// O(n^2) scan: mean wmae of every sample value used as the constant.
std::pair<double, double> brute_force_constant(const std::vector<double>& x, double w) {
    double best_c = 0, best_loss = INFINITY;
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    for (double c : sorted) {
        double loss = 0;
        for (double y : x) loss += wmae(c - y, w);
        loss /= double(x.size());
        if (loss < best_loss - 1e-12 * (std::abs(loss) + 1)) {
            best_loss = loss;
            best_c = c;
        }
    }
    return {best_c, best_loss};
}

std::vector<double> lognormal_sample(std::size_t n, std::uint64_t seed) {
    auto rng = Rng::stream(seed, "calibration-sample");
    std::vector<double> v(n);
    for (auto& x : v) x = std::exp(0.5 * rng.normal());
    return v;
}

/// Stand-in for training: the best constant under wmae(w), scored on `val`.
WeightEvaluator oracle_evaluator(std::vector<double> train, std::vector<double> val) {
    return [train = std::move(train), val = std::move(val)](double w) {
        const double c = constant_predictor_oracle(train, w).c;
        WeightTrial t;
        t.w = w;
        std::size_t over = 0;
        for (double y : val) {
            if (c < y) t.violation_rate += 1;
            if (c > y) {
                t.volume += c - y;
                ++over;
            }
        }
        t.conditional_volume = over ? t.volume / double(over) : 0.0;
        t.violation_rate /= double(val.size());
        t.volume /= double(val.size());
        return t;
    };
}

}  // namespace

TEST_SUITE("sla-calibration") {

TEST_CASE("constant oracle examples") {
    const auto x = one_to(100);
    auto median = constant_predictor_oracle(x, 1.0);
    CHECK(median.c == 50.0);
    CHECK(median.violation_rate == doctest::Approx(0.5));

    auto q95 = constant_predictor_oracle(x, 19.0);
    CHECK(q95.c == 95.0);
    CHECK(q95.violation_rate == doctest::Approx(0.05));

    const std::vector<double> two{0.0, 10.0};
    CHECK(constant_predictor_oracle(two, 3.0).c == 10.0);
    CHECK(constant_predictor_oracle(two, 3.0).violation_rate == 0.0);

    CHECK(oracle_weight(0.05) == doctest::Approx(19.0));
    CHECK(oracle_weight(0.03) == doctest::Approx(32.333333333));
    CHECK(oracle_weight(0.5) == 1.0);
    CHECK_THROWS_AS(constant_predictor_oracle(std::vector<double>{}, 1.0), DataError);
}

TEST_CASE("constant oracle matches brute force and the order statistic") {
    auto rng = Rng::stream(5, "oracle-cases");
    for (int round = 0; round < 60; ++round) {
        const std::size_t n = 1 + rng.below(80);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.normal() * 7 + 3;
        const double w = rng.uniform(0.2, 60.0);
        const auto fast = constant_predictor_oracle(x, w);
        const auto [c, loss] = brute_force_constant(x, w);
        REQUIRE(fast.c == c);
        REQUIRE(fast.loss == doctest::Approx(loss).epsilon(1e-12));

        auto sorted = x;
        std::sort(sorted.begin(), sorted.end());
        const double q = double(n) * w / (1.0 + w);
        // At an exact integer the loss is flat between two order statistics
        // and the smaller one wins.
        const auto k = static_cast<std::size_t>(std::ceil(q - 1e-9));
        REQUIRE(fast.c == sorted[std::max<std::size_t>(k, 1) - 1]);
    }
}

TEST_CASE("oracle violation rate is non-increasing in w and tracks 1/(1+w)") {
    const auto x = lognormal_sample(10000, 3);
    double prev = 1.0;
    for (double w = 0.25; w <= 128; w *= 1.3) {
        const double rate = constant_predictor_oracle(x, w).violation_rate;
        CHECK(rate <= prev);
        CHECK(std::abs(rate - 1.0 / (1.0 + w)) < 0.01);
        prev = rate;
    }
}

TEST_CASE("line search with an oracle evaluator") {
    const auto eval = oracle_evaluator(lognormal_sample(4000, 1), lognormal_sample(2000, 2));

    const auto r5 = calibrate_weight(0.05, eval);
    CHECK(r5.satisfied);
    CHECK(r5.w >= 9.5);
    CHECK(r5.w <= 38.0);
    CHECK(r5.violation_rate >= 0.03);
    CHECK(r5.violation_rate <= 0.065);
    CHECK(std::any_of(r5.trace.begin(), r5.trace.end(), [&](const WeightTrial& t) { return t.w == r5.w; }));
    // Seven grid points plus the golden-section probes.
    CHECK(r5.trace.size() == 11);

    const auto r3 = calibrate_weight(0.03, eval);
    CHECK(r3.w > r5.w);
    CHECK(r3.volume >= r5.volume);

    const auto r50 = calibrate_weight(0.5, eval);
    CHECK(r50.w == 1.0);
    CHECK(r50.violation_rate == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("line search is independent of the worker count") {
    const auto eval = oracle_evaluator(lognormal_sample(3000, 4), lognormal_sample(1000, 5));
    const auto a = calibrate_weight(0.03, eval, {}, 1);
    const auto b = calibrate_weight(0.03, eval, {}, 4);
    CHECK(a.w == b.w);
    CHECK(a.trace == b.trace);
}

TEST_CASE("selection rules") {
    struct Row {
        double w, rate, volume;
    };
    auto table = [](std::vector<Row> rows) {
        return [rows](double w) {
            for (const auto& r : rows)
                if (r.w == w) return WeightTrial{w, r.rate, r.volume, r.volume};
            return WeightTrial{w, 0.5, 100.0, 100.0};
        };
    };
    CalibrationSearch search;
    search.grid = {1, 2, 4};
    search.refine_steps = 0;

    SUBCASE("smallest volume among feasible trials") {
        const auto r = calibrate_weight(0.05, table({{1, 0.30, 1}, {2, 0.06, 3}, {4, 0.01, 9}}), search);
        CHECK(r.satisfied);
        CHECK(r.w == 2.0);
    }
    SUBCASE("tolerance boundary counts as feasible") {
        const auto r = calibrate_weight(0.05, table({{1, 0.30, 1}, {2, 0.065, 3}, {4, 0.01, 9}}), search);
        CHECK(r.w == 2.0);
    }
    SUBCASE("volume ties go to the smaller w") {
        const auto r = calibrate_weight(0.05, table({{1, 0.30, 1}, {2, 0.02, 5}, {4, 0.01, 5}}), search);
        CHECK(r.w == 2.0);
    }
    SUBCASE("nothing feasible") {
        const auto r = calibrate_weight(0.05, table({{1, 0.30, 1}, {2, 0.20, 3}, {4, 0.10, 9}}), search);
        CHECK_FALSE(r.satisfied);
        CHECK(r.w == 4.0);
        CHECK(r.violation_rate == 0.10);
    }
    SUBCASE("refinement probes lie inside the bracket") {
        search.grid = {1, 2, 4, 8};
        search.refine_steps = 4;
        const auto r = calibrate_weight(0.05, [](double w) { return WeightTrial{w, 0.4 / w, w, w}; }, search);
        REQUIRE(r.trace.size() == 8);
        for (std::size_t i = 4; i < r.trace.size(); ++i) {
            CHECK(r.trace[i].w > 4.0);
            CHECK(r.trace[i].w < 8.0);
        }
    }
}

TEST_CASE("search range errors") {
    const auto eval = [](double w) { return WeightTrial{w, 0.0, 0.0, 0.0}; };
    CalibrationSearch search;
    search.grid = {};
    CHECK_THROWS_AS(calibrate_weight(0.05, eval, search), ConfigError);
    search.grid = {2, 4};
    CHECK_THROWS_AS(calibrate_weight(0.05, eval, search), ConfigError);
    search.grid = {1, 4, 2};
    CHECK_THROWS_AS(calibrate_weight(0.05, eval, search), ConfigError);
    CHECK_THROWS_AS(calibrate_weight(0.0, eval), ConfigError);
    CHECK_THROWS_AS(calibrate_weight(1.0, eval), ConfigError);
}

}  // TEST_SUITE
