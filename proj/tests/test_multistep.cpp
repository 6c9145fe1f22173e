#include "helpers.hpp"

#include "slacast/error.hpp"
#include "slacast/multistep.hpp"

#include <doctest.h>

using namespace slacast;
using testing::default_region;
using testing::default_target;
using testing::random_model;

namespace {

FeatureTable table_for(const ForecastModel& m) { return assemble_inputs(m.recipe, default_target(), &default_region()); }

NeighborContext neighbor_context(const ForecastModel& m) {
    NeighborContext ctx;
    std::uint64_t seed = 100;
    for (const auto* weights : {&m.recipe.incoming_weights, &m.recipe.outgoing_weights}) {
        for (const auto& [cell, _] : *weights) {
            if (ctx.models.contains(cell)) continue;
            const auto& ds = default_region().at(cell);
            ForecastModel nm;
            nm.recipe = build_recipe(Variant::univariate, ds.slice(0, 6720), nullptr);
            nm.spec = {1, 3, 1, 24};
            nm.params = LstmParams::random(nm.spec, seed++);
            nm.normalizer.set(kTargetLabel, fit_moments(ds.values(kTargetLabel).subspan(0, 6720)));
            ctx.models.emplace(cell, nm);
            const auto f10 = ds.values(kTargetLabel);
            ctx.f10.emplace(cell, std::vector<double>(f10.begin(), f10.end()));
        }
    }
    return ctx;
}

}  // namespace

TEST_SUITE("multistep-forecast") {

TEST_CASE("one step equals predict_one") {
    for (auto v : all_variants()) {
        const auto m = random_model(v, 3);
        const auto table = table_for(m);
        for (std::size_t origin : {std::size_t{24}, std::size_t{8064}, std::size_t{8735}}) {
            const double one = predict_one(m, table, origin);
            CHECK(predict_multistep(m, table, origin, 1)[0] == one);
            CHECK(predict_multistep(m, table, origin, 2)[0] == one);
        }
    }
}

TEST_CASE("predict_one inverts the normalized network output") {
    const auto m = random_model(Variant::univariate, 8);
    const auto table = table_for(m);
    const std::size_t origin = 264;
    const Frame window = normalize_inputs(m, table.values.middleRows(origin - 24, 24));
    const auto moments = m.normalizer.at(kTargetLabel);
    CHECK(predict_one(m, table, origin) == doctest::Approx(forward(m.params, window) * moments.std + moments.mean));
}

TEST_CASE("prefix consistency") {
    for (auto v : all_variants()) {
        const auto m = random_model(v, 4);
        const auto table = table_for(m);
        const auto full = predict_multistep(m, table, 8100, 24);
        for (std::size_t h : {1, 2, 4, 8}) {
            const auto part = predict_multistep(m, table, 8100, h);
            CHECK(std::equal(part.begin(), part.end(), full.begin()));
        }
    }
}

TEST_CASE("future rows are never read") {
    for (auto v : all_variants()) {
        const auto m = random_model(v, 5);
        const auto table = table_for(m);
        auto poisoned = table;
        const std::size_t origin = 8200;
        poisoned.values.bottomRows(poisoned.values.rows() - origin).setConstant(1e9);
        CHECK(predict_multistep(m, table, origin, 24) == predict_multistep(m, poisoned, origin, 24));
        // Table ending exactly at the origin works too.
        CHECK(predict_multistep(m, table, origin, 24) == predict_multistep(m, table.rows(0, origin), origin, 24));
    }
}

TEST_CASE("exogenous fill during recursion") {
    const auto m = random_model(Variant::all, 6);
    const auto table = table_for(m);
    const std::size_t origin = 8300, steps = 24;
    const auto trace = trace_multistep(m, table, origin, steps);
    const std::size_t hist = history_rows(m);
    REQUIRE(trace.inputs.rows() == Eigen::Index(hist + steps));

    const TimeGrid future = table.grid.slice(origin, steps);
    const auto day = peak_days_vector(future, m.recipe.peak->weekend_days);
    const auto hour = peak_hours_vector(*m.recipe.peak, future);
    const auto cols = m.recipe.columns();
    for (std::size_t k = 0; k < steps; ++k) {
        const auto row = Eigen::Index(hist + k);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double got = trace.inputs(row, Eigen::Index(c));
            if (cols[c] == kTargetLabel)
                CHECK(got == trace.predictions[k]);
            else if (cols[c] == kPeakDayColumn)
                CHECK(got == day.values[k]);
            else if (cols[c] == kPeakHourColumn)
                CHECK(got == hour.values[k]);
            else  // counters and handover columns: same hour one day earlier
                CHECK(got == trace.inputs(row - 24, Eigen::Index(c)));
        }
    }
    // Calendar columns also agree with the observed table over the same hours.
    for (std::size_t k = 0; k < steps; ++k) {
        CHECK(trace.inputs(Eigen::Index(hist + k), Eigen::Index(table.column_index(kPeakDayColumn))) ==
              table.values(Eigen::Index(origin + k), Eigen::Index(table.column_index(kPeakDayColumn))));
        CHECK(trace.inputs(Eigen::Index(hist + k), Eigen::Index(table.column_index(kPeakHourColumn))) ==
              table.values(Eigen::Index(origin + k), Eigen::Index(table.column_index(kPeakHourColumn))));
    }
}

TEST_CASE("a model at its fixed point stays there") {
    auto m = random_model(Variant::univariate, 7);
    m.params = LstmParams(m.spec);
    m.params.head_bias() = 0.3;
    auto table = table_for(m);
    const double level = m.normalizer.invert(kTargetLabel, 0.3);
    table.values(8499, 0) = level;
    for (double y : predict_multistep(m, table, 8500, 24)) CHECK(y == level);
}

TEST_CASE("neighbor-recursive handover fill") {
    const auto m = random_model(Variant::handover, 9);
    const auto table = table_for(m);
    HorizonPlan plan;
    plan.handover_policy = ExogenousPolicy::neighbor_recursive;
    CHECK_THROWS_AS(predict_multistep(m, table, 8300, 8, plan), DataError);

    auto ctx = neighbor_context(m);
    const auto trace = trace_multistep(m, table, 8300, 8, plan, &ctx);
    const std::size_t hist = history_rows(m);
    const auto in_col = Eigen::Index(table.column_index(kHandoverInColumn));
    std::map<CellId, std::vector<double>> fut;
    for (const auto& [cell, nm] : ctx.models) {
        FeatureTable nt{table.grid, {kTargetLabel}, Frame(table.values.rows(), 1)};
        for (Eigen::Index r = 0; r < nt.values.rows(); ++r) nt.values(r, 0) = ctx.f10.at(cell)[std::size_t(r)];
        fut[cell] = predict_multistep(nm, nt, 8300, 8);
    }
    for (std::size_t k = 0; k < 8; ++k) {
        double expect = 0;
        for (const auto& [cell, w] : m.recipe.incoming_weights) expect += w * fut[cell][k];
        CHECK(trace.inputs(Eigen::Index(hist + k), in_col) == doctest::Approx(expect).epsilon(1e-12));
    }
    // One-step forecasts never use filled values.
    CHECK(trace.predictions[0] == predict_one(m, table, 8300));

    ctx.models.erase(ctx.models.begin());
    CHECK_THROWS_AS(predict_multistep(m, table, 8300, 8, plan, &ctx), DataError);
    // The default policy ignores neighbor models entirely.
    CHECK_NOTHROW(predict_multistep(m, table, 8300, 8));
}

TEST_CASE("plan and shape errors") {
    CHECK(parse_policy("seasonal-naive") == ExogenousPolicy::seasonal_naive);
    CHECK(parse_policy("neighbor-recursive") == ExogenousPolicy::neighbor_recursive);
    CHECK_THROWS_AS(parse_policy("oracle"), ConfigError);
    HorizonPlan plan;
    CHECK_NOTHROW(plan.validate());
    plan.horizons = {};
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.horizons = {0, 1};
    CHECK_THROWS_AS(plan.validate(), ConfigError);

    const auto m = random_model(Variant::univariate, 1);
    const auto table = table_for(m);
    CHECK_THROWS_AS(predict_one(m, table, 23), DataError);
    CHECK_THROWS_AS(predict_multistep(m, table, 8737, 2), DataError);
    const auto other = random_model(Variant::ran, 1);
    CHECK_THROWS_AS(predict_one(other, table, 100), DataError);
}

}  // TEST_SUITE
