#include "helpers.hpp"

#include "slacast/csv_io.hpp"
#include "slacast/error.hpp"
#include "slacast/features.hpp"

#include <doctest.h>

#include <sstream>

using namespace slacast;

namespace {

ScenarioConfig small_config(std::size_t weeks = 8) {
    auto cfg = default_scenario_config();
    cfg.weeks = weeks;
    return cfg;
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("synth-scenario") {

TEST_CASE("reference handover neighborhood") {
    const auto ho = table2_handover_matrix();
    const auto gu14 = CellId::parse("GU14");
    CHECK(ho.rate(gu14, CellId::parse("GU12"), HandoverDirection::incoming) == 66.79);
    CHECK(ho.rate(gu14, CellId::parse("SY24"), HandoverDirection::outgoing) == 17.24);
    CHECK(ho.total(gu14, HandoverDirection::incoming) == doctest::Approx(97.73).epsilon(1e-12));
    CHECK(ho.neighbors(gu14, HandoverDirection::incoming).size() == 10);
    CHECK(ho.neighbors(gu14, HandoverDirection::outgoing).size() == 10);
    CHECK(ho.cells().size() == 14);

    // The CSV form round-trips.
    std::ostringstream out;
    write_handover_csv(ho, out);
    std::istringstream in(out.str());
    CHECK(read_handover_csv(in) == ho);
}

TEST_CASE("handover matrix validation") {
    HandoverMatrix ho;
    const auto a = CellId::parse("AA11");
    const auto b = CellId::parse("BB11");
    CHECK_THROWS_AS(ho.add(a, a, HandoverDirection::incoming, 10), DataError);
    CHECK_THROWS_AS(ho.add(a, b, HandoverDirection::incoming, -1), DataError);
    ho.add(a, b, HandoverDirection::incoming, 60);
    CHECK_THROWS_AS(ho.add(a, b, HandoverDirection::incoming, 10), DataError);
    CHECK_THROWS_AS(ho.add(a, CellId::parse("CC11"), HandoverDirection::incoming, 50), DataError);
}

TEST_CASE("generation is deterministic") {
    const auto cfg = small_config();
    const auto ho = table2_handover_matrix();
    const auto a = generate_region(cfg, ho);
    const auto b = generate_region(cfg, ho);
    REQUIRE(a.size() == 14);
    for (const auto& [cell, ds] : a) {
        std::ostringstream x, y;
        write_csv(ds, x);
        write_csv(b.at(cell), y);
        REQUIRE(x.str() == y.str());
    }
    auto other = cfg;
    other.seed += 1;
    CHECK_FALSE(generate_region(other, ho).at(CellId::parse("GU14")) == a.at(CellId::parse("GU14")));
}

TEST_CASE("adding a cell leaves other cells untouched") {
    auto cfg = small_config();
    cfg.cells = {CellId::parse("AA11"), CellId::parse("BB11")};
    const auto a = generate_region(cfg, {});
    cfg.cells.push_back(CellId::parse("CC11"));
    const auto b = generate_region(cfg, {});
    CHECK(a.at(CellId::parse("AA11")) == b.at(CellId::parse("AA11")));
    CHECK(a.at(CellId::parse("BB11")) == b.at(CellId::parse("BB11")));
}

TEST_CASE("weekday to weekend ratio") {
    const auto& ds = testing::default_target();
    const auto f10 = ds.values("F10");
    double wd = 0, we = 0;
    std::size_t nwd = 0, nwe = 0;
    for (std::size_t t = 0; t < f10.size(); ++t) {
        if (ds.grid().day_of_week(t) < 5) {
            wd += f10[t];
            ++nwd;
        } else {
            we += f10[t];
            ++nwe;
        }
    }
    const double ratio = (wd / nwd) / (we / nwe);
    CHECK(ratio >= 1.2);
    CHECK(ratio <= 1.4);
}

TEST_CASE("counter correlations") {
    const auto& ds = testing::default_target();
    const auto f10 = to_vec(ds.values("F10"));
    for (const char* label : {"F16", "F17", "F18", "F19"})
        CHECK(testing::pearson_reference(f10, to_vec(ds.values(label))) >= 0.90);
    for (int f = 1; f <= 20; ++f) {
        if (f == 10 || (f >= 16 && f <= 19)) continue;
        CHECK(std::abs(testing::pearson_reference(f10, to_vec(ds.values(feature_label(f))))) <= 0.5 + 1e-9);
    }

    auto cfg = default_scenario_config();
    cfg.rho = 0.99;
    const auto cell = CellId::parse("GU14");
    const auto counters = derive_counter_features({"F10", f10}, cfg, cell);
    REQUIRE(counters.size() == 19);
    for (const auto& s : counters) {
        const double r = testing::pearson_reference(f10, s.values);
        if (s.label == "F18") CHECK(r >= 0.95);
        if (s.label == "F3") CHECK(std::abs(r) <= 0.8);
    }
}

TEST_CASE("config validation") {
    auto cfg = default_scenario_config();
    cfg.rho = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_scenario_config();
    cfg.rho = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_scenario_config();
    cfg.weeks = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_scenario_config();
    cfg.spike_probability = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_scenario_config();
    cfg.cells.pop_back();
    CHECK_THROWS_AS(generate_region(cfg, table2_handover_matrix()), DataError);
}

TEST_CASE("daily period dominates") {
    const auto f10 = to_vec(testing::default_target().values("F10"));
    CHECK(testing::autocorrelation(f10, 24) > testing::autocorrelation(f10, 13));
}

TEST_CASE("neighbor coupling is real") {
    const auto& region = testing::default_region();
    const auto ho = table2_handover_matrix();
    const auto target = CellId::parse("GU14");
    std::map<CellId, std::vector<double>> f10;
    for (const auto& [cell, ds] : region) f10[cell] = to_vec(ds.values("F10"));

    // Compare deseasonalized series so the shared daily shape cannot explain
    // the correlation.
    const auto residual = [](const std::vector<double>& x) {
        std::vector<double> r(x.size() - 168);
        for (std::size_t t = 168; t < x.size(); ++t) r[t - 168] = x[t] - x[t - 168];
        return r;
    };
    const auto lag1 = [&](const std::map<CellId, std::vector<double>>& series) {
        const auto mix = residual(weighted_average(ho.weights(target, HandoverDirection::incoming), series));
        const auto y = residual(series.at(target));
        std::vector<double> a(mix.begin(), mix.end() - 1), b(y.begin() + 1, y.end());
        return testing::pearson_reference(a, b);
    };
    const double coupled = lag1(f10);
    CHECK(coupled > 0.3);

    // Shuffle each neighbor in whole-week blocks: seasonality survives, the
    // hour-to-hour link to the target does not.
    auto shuffled = f10;
    auto rng = Rng::stream(99, "block-shuffle");
    for (auto& [cell, series] : shuffled) {
        if (cell == target) continue;
        const std::size_t weeks = series.size() / 168;
        std::vector<std::size_t> order(weeks);
        for (std::size_t i = 0; i < weeks; ++i) order[i] = i;
        rng.shuffle(std::span<std::size_t>(order));
        std::vector<double> out(series.size());
        for (std::size_t w = 0; w < weeks; ++w)
            for (std::size_t h = 0; h < 168; ++h) out[w * 168 + h] = series[order[w] * 168 + h];
        series = std::move(out);
    }
    const double broken = lag1(shuffled);
    CHECK(std::abs(broken) < 0.1);
    CHECK(coupled > 3 * std::abs(broken));
}

}  // TEST_SUITE
