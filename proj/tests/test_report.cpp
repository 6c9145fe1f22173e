#include "helpers.hpp"

#include "slacast/error.hpp"
#include "slacast/loss.hpp"
#include "slacast/metrics.hpp"
#include "slacast/report.hpp"

#include <doctest.h>

using namespace slacast;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, const char* name) {
    auto rng = Rng::stream(seed, name);
    std::vector<double> v(n);
    for (auto& x : v) x = 50 + 10 * rng.normal();
    return v;
}

struct Fixture {
    std::vector<ForecastModel> models;
    std::map<Variant, FeatureTable> tables;
    ReportInputs inputs;

    Fixture() {
        models.reserve(10);
        for (auto v : all_variants()) {
            for (int s : {3, 5}) {
                models.push_back(testing::random_model(v, std::uint64_t(s) * 10 + std::uint64_t(v), 3));
                models.back().loss = {s == 3 ? 32.0 : 19.0, s / 100.0};
            }
            tables.emplace(v, assemble_inputs(models.back().recipe, testing::default_target(), &testing::default_region()));
        }
        inputs.config_hash = "00000000deadbeef";
        inputs.seed = 1;
        inputs.target_cell = "GU14";
        inputs.volume_unit = "GB";
        inputs.variants = all_variants();
        inputs.sla_percents = {3, 5};
        inputs.test_begin = 8064;
        inputs.test_end = 8064 + 72;
        std::size_t i = 0;
        for (auto v : all_variants()) {
            for (int s : {3, 5}) inputs.models[{v, s}] = &models[i++];
            inputs.tables[v] = &tables.at(v);
        }
    }
};

}  // namespace

TEST_SUITE("evaluation-report") {

TEST_CASE("violation rate") {
    const std::vector<double> actual{4, 4, 4};
    CHECK(sla_violation_rate(std::vector<double>{3, 5, 2}, actual) == doctest::Approx(200.0 / 3.0));
    CHECK(sla_violation_rate(std::vector<double>{5, 5, 5}, actual) == 0.0);
    CHECK(sla_violation_rate(std::vector<double>{3, 3, 3}, actual) == 100.0);
    CHECK(sla_violation_rate(actual, actual) == 0.0);
    CHECK_THROWS_AS(sla_violation_rate(std::vector<double>{1}, actual), DataError);
    CHECK_THROWS_AS(sla_violation_rate(std::vector<double>{}, std::vector<double>{}), DataError);

    const auto a = gaussian(500, 1, "a"), p = gaussian(500, 2, "p");
    double prev = sla_violation_rate(p, a);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.size(); ++i) hits += p[i] >= a[i];
    CHECK(prev + 100.0 * double(hits) / 500.0 == doctest::Approx(100.0));
    for (double eps : {0.01, 0.5, 2.0, 10.0, 100.0}) {
        auto q = p;
        for (auto& x : q) x += eps;
        const double r = sla_violation_rate(q, a);
        CHECK(r <= prev);
        prev = r;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("overprovisioning volume") {
    const std::vector<double> actual{4, 4, 4};
    const auto v = overprovisioning_volume(std::vector<double>{5, 3, 6}, actual);
    CHECK(v.unconditional == doctest::Approx(1.0));
    CHECK(v.conditional == doctest::Approx(1.5));
    const auto zero = overprovisioning_volume(actual, actual);
    CHECK(zero.unconditional == 0.0);
    CHECK(zero.conditional == 0.0);
    const auto c = overprovisioning_volume(std::vector<double>{6.5, 6.5, 6.5}, actual);
    CHECK(c.unconditional == 2.5);
    CHECK(c.conditional == 2.5);
    CHECK_THROWS_AS(overprovisioning_volume(std::vector<double>{1, 2}, actual), DataError);
}

TEST_CASE("test loss") {
    const auto a = gaussian(400, 3, "a"), p = gaussian(400, 4, "p");
    const Moments m{47.0, 9.5};
    CHECK(test_loss(a, a, m, 19.0) == 0.0);

    double mae = 0;
    for (std::size_t i = 0; i < a.size(); ++i) mae += std::abs((p[i] - m.mean) / m.std - (a[i] - m.mean) / m.std);
    CHECK(test_loss(p, a, m, 1.0) == doctest::Approx(mae / 400.0).epsilon(1e-12));

    for (double w : {0.5, 19.0, 32.33}) {
        long double sum = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double e = (p[i] - a[i]) / m.std;
            sum += e > 0 ? e : -w * e;
        }
        CHECK(test_loss(p, a, m, w) == doctest::Approx(double(sum / 400)).epsilon(1e-12));
    }
    CHECK(mean_absolute_error(std::vector<double>{1, 2}, std::vector<double>{2, 4}) == 1.5);
    CHECK(mean_squared_error(std::vector<double>{1, 2}, std::vector<double>{2, 4}) == 2.5);
}

TEST_CASE("report grid is complete and round-trips") {
    Fixture fx;
    std::map<std::pair<Variant, int>, std::map<std::size_t, HorizonSeries>> series;
    const auto report = build_report(fx.inputs, &series);
    CHECK(report.cells.size() == 5 * 2 * 5);
    CHECK(report.complete());
    for (const auto& c : report.cells) {
        CHECK_FALSE(c.skipped);
        CHECK(c.violation_rate >= 0.0);
        CHECK(c.violation_rate <= 100.0);
        CHECK(c.volume >= 0.0);
        CHECK(c.samples == 72 - c.horizon + 1);
    }
    const auto* cell = report.find(Variant::handover, 3, 4);
    REQUIRE(cell != nullptr);
    const auto& s = series.at({Variant::handover, 3}).at(4);
    CHECK(cell->violation_rate == sla_violation_rate(s.pred, s.actual));
    CHECK(cell->w == 32.0);
    CHECK(s.stamps.front() == testing::default_target().grid().at(8064 + 3));

    const auto j = report_to_json(report);
    const auto back = report_from_json(nlohmann::json::parse(j.dump()));
    CHECK(report_to_json(back).dump() == j.dump());
    CHECK(j.at("published_reference").at("single_step").size() == 10);

    // Regeneration is byte-identical, regardless of the worker count.
    fx.inputs.jobs = 3;
    const auto again = build_report(fx.inputs);
    CHECK(report_to_json(again).dump(2) == j.dump(2));
    CHECK(single_step_csv(again) == single_step_csv(report));
    CHECK(multistep_csv(again) == multistep_csv(report));

    CHECK_THROWS_AS(report_from_json(nlohmann::json{{"cells", 1}}), DataError);
}

TEST_CASE("rolling forecasts agree with direct multistep calls") {
    Fixture fx;
    const auto& m = *fx.inputs.models.at({Variant::peak, 5});
    const auto& table = fx.tables.at(Variant::peak);
    HorizonPlan plan;
    const auto s = rolling_forecasts(m, table, 8100, 8130, plan);
    for (std::size_t h : plan.horizons) {
        const auto& hs = s.at(h);
        for (std::size_t i = 0; i < hs.pred.size(); ++i) {
            REQUIRE(hs.pred[i] == predict_multistep(m, table, 8100 + i, h)[h - 1]);
            REQUIRE(hs.actual[i] == table.values(Eigen::Index(8100 + i + h - 1), 0));
        }
    }
}

TEST_CASE("published figures and tables") {
    const auto ref = published_reference();
    bool uni5 = false, ho3 = false;
    for (const auto& r : ref.at("single_step")) {
        if (r.at("model") == "univariate LSTM" && r.at("sla_percent") == 5) {
            CHECK(r.at("loss").get<double>() == 0.44);
            CHECK(r.at("volume").get<double>() == 36.92);
            uni5 = true;
        }
        if (r.at("model") == "mvLSTM-handover" && r.at("sla_percent") == 3) {
            CHECK(r.at("loss").get<double>() == 0.44);
            CHECK(r.at("volume").get<double>() == 38.08);
            ho3 = true;
        }
    }
    CHECK(uni5);
    CHECK(ho3);

    const auto csv = plot_csv({testing::kMonday, testing::kMonday + 1}, {1.5, 2}, {{"univariate", {1, 2.25}}});
    CHECK(csv == "timestamp,actual,pred_univariate\n2022-01-03T00:00:00,1.5,1\n2022-01-03T01:00:00,2,2.25\n");
}

TEST_CASE("missing models are reported") {
    Fixture fx;
    fx.inputs.models.erase({Variant::ran, 3});
    CHECK_THROWS_AS(build_report(fx.inputs), DataError);
    Fixture fy;
    fy.inputs.tables.erase(Variant::all);
    CHECK_THROWS_AS(build_report(fy.inputs), DataError);
}

}  // TEST_SUITE
