#include "helpers.hpp"

#include "slacast/csv_io.hpp"
#include "slacast/error.hpp"
#include "slacast/folds.hpp"
#include "slacast/normalizer.hpp"
#include "slacast/window.hpp"

#include <doctest.h>

#include <sstream>

using namespace slacast;
using testing::make_dataset;

TEST_SUITE("core-data") {

TEST_CASE("cell ids and timestamps") {
    const auto id = CellId::parse("GU14");
    CHECK(id.site() == "GU");
    CHECK(id.sector() == 1);
    CHECK(id.carrier() == 4);
    CHECK(id.str() == "GU14");
    CHECK_THROWS_AS(CellId::parse("G14"), DataError);
    CHECK_THROWS_AS(CellId::parse("gu14"), DataError);

    const auto t = parse_timestamp("2022-01-03T00:00:00");
    CHECK(t == testing::kMonday);
    CHECK(day_of_week(t) == 0);
    CHECK(day_of_week(t + 5 * 24) == 5);
    CHECK(hour_of_day(t + 30) == 6);
    CHECK(format_timestamp(t + 30) == "2022-01-04T06:00:00");
    CHECK(parse_timestamp("2022-01-04 06:00") == t + 30);
    CHECK_THROWS_AS(parse_timestamp("2022-01-04T06:30:00"), DataError);
    CHECK(parse_timestamp("2024-03-01T00:00:00") - parse_timestamp("2024-02-28T00:00:00") == 48);
}

TEST_CASE("split sizes follow whole weeks") {
    const auto ds = make_dataset(8736, [](int, std::size_t t) { return double(t); });
    const auto s = split_dataset(ds, {});
    CHECK(s.train.length() == 6720);
    CHECK(s.val.length() == 1344);
    CHECK(s.test.length() == 672);
    CHECK(s.val.values("F10")[0] == 6720.0);
    CHECK(s.test.grid().start() == ds.grid().at(8064));

    const auto small = make_dataset(672, [](int, std::size_t t) { return double(t); });
    CHECK_THROWS_AS(split_dataset(small, {}), DataError);
    const auto s2 = split_dataset(small, {2, 1, 1});
    CHECK(s2.train.length() == 336);
    CHECK(s2.val.length() == 168);
    CHECK(s2.test.length() == 168);
}

TEST_CASE("normalizer moments and round trip") {
    const auto m = fit_moments(std::vector<double>{0.0, 2.0});
    CHECK(m.mean == 1.0);
    CHECK(m.std == 1.0);
    Normalizer n;
    n.set("F10", m);
    CHECK(n.apply("F10", 0.0) == -1.0);
    CHECK(n.apply("F10", 2.0) == 1.0);
    CHECK_THROWS_AS(fit_moments(std::vector<double>{5.0, 5.0, 5.0}), DataError);

    const auto ds = testing::noise_dataset(500, 7);
    const auto norm = fit_normalizer(ds);
    const auto back = norm.invert(norm.apply(ds));
    for (const auto& label : ds.labels()) {
        const auto a = ds.values(label);
        const auto b = back.values(label);
        for (std::size_t t = 0; t < a.size(); ++t) REQUIRE(std::abs(a[t] - b[t]) < 1e-9);
    }
}

TEST_CASE("normalizer depends on the training slice only") {
    auto ds = testing::noise_dataset(8736, 3);
    const auto a = fit_normalizer(split_dataset(ds, {}).train);
    auto series = ds.all();
    for (auto& [_, v] : series)
        for (std::size_t t = 6720; t < v.size(); ++t) v[t] = 1e6 + double(t);
    const CellDataset altered(ds.cell(), ds.grid(), series);
    CHECK(fit_normalizer(split_dataset(altered, {}).train) == a);
}

TEST_CASE("fold plan geometry") {
    const TimeGrid grid(testing::kMonday, 8736);
    const auto plan = make_folds(grid, 6, 1344);
    REQUIRE(plan.k() == 6);
    const std::size_t train_len = 8736 - 6 * 1344;
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& f = plan.folds[i];
        CHECK(f.train.begin == i * 1344);
        CHECK(f.train.size() == train_len);
        CHECK(f.val.begin == i * 1344 + train_len);
        CHECK(f.val.size() == 1344);
        CHECK_FALSE(f.train.overlaps(f.val));
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(plan.folds[j].val.overlaps(f.val));
    }
    CHECK(plan.folds.back().val.end == 8736);

    // A single fold reproduces the train/val part of the default split.
    const auto one = make_folds(TimeGrid(testing::kMonday, 8064), 1, 1344);
    CHECK(one.folds[0].train.begin == 0);
    CHECK(one.folds[0].train.end == 6720);
    CHECK(one.folds[0].val.end == 8064);

    CHECK_THROWS_AS(make_folds(TimeGrid(testing::kMonday, 2000), 6, 1344), ConfigError);
    CHECK_THROWS_AS(make_folds(grid, 0, 1344), ConfigError);
    CHECK_THROWS_AS(make_folds(grid, 2, 0), ConfigError);
}

TEST_CASE("fold ranges tile without gaps over random shapes") {
    auto rng = Rng::stream(11, "folds");
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(8);
        const std::size_t shift = 1 + rng.below(300);
        const std::size_t length = k * shift + 1 + rng.below(500);
        const auto plan = make_folds(TimeGrid(0, length), k, shift);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& f = plan.folds[i];
            REQUIRE(f.train.end == f.val.begin);
            REQUIRE(f.val.end <= length);
            if (i > 0) REQUIRE(plan.folds[i - 1].val.end == f.val.begin);
        }
        REQUIRE(plan.folds.back().val.end == length);
    }
}

TEST_CASE("windowize counts and targets") {
    const auto ramp = make_dataset(48, [](int, std::size_t t) { return double(t); });
    const auto samples = windowize(ramp, {"F10"}, 24);
    REQUIRE(samples.size() == 24);
    CHECK(samples[0].target == 24.0);
    CHECK(samples[0].window(0, 0) == 0.0);
    CHECK(samples[0].window(23, 0) == 23.0);
    for (const auto& s : samples) CHECK(s.first_index + 24 == s.target_index);
    CHECK(windowize(ramp, {"F10"}, 48).empty());

    // Windows end strictly before their target hour.
    const WindowSet ws(to_frame(ramp, {"F10", "F16"}), 24);
    for (std::size_t t = 0; t < ws.size(); ++t) CHECK(ws.window(t)(23, 0) < ws.target(t));
}

TEST_CASE("normalization commutes with windowing") {
    const auto ds = testing::noise_dataset(100, 5);
    const auto norm = fit_normalizer(ds);
    const auto a = windowize(norm.apply(ds), {"F10", "F3"}, 12);
    const auto raw = windowize(ds, {"F10", "F3"}, 12);
    REQUIRE(a.size() == raw.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].target == doctest::Approx(norm.apply("F10", raw[i].target)).epsilon(1e-15));
        for (Eigen::Index r = 0; r < 12; ++r) {
            CHECK(a[i].window(r, 0) == doctest::Approx(norm.apply("F10", raw[i].window(r, 0))).epsilon(1e-15));
            CHECK(a[i].window(r, 1) == doctest::Approx(norm.apply("F3", raw[i].window(r, 1))).epsilon(1e-15));
        }
    }
}

TEST_CASE("csv ingestion") {
    const auto ds = make_dataset(168, [](int f, std::size_t t) { return f * 1000.0 + t + 0.25; });
    std::ostringstream out;
    write_csv(ds, out);
    {
        std::istringstream in(out.str());
        const auto back = ingest_csv(in, ds.cell());
        CHECK(back.length() == 168);
        CHECK(back == ds);
    }
    SUBCASE("missing F10 column") {
        std::string text = out.str();
        const auto pos = text.find(",F10");
        text.erase(pos, 4);
        std::istringstream in(text);
        CHECK_THROWS_WITH_AS(ingest_csv(in, ds.cell()), doctest::Contains("malformed-row"), DataError);
    }
    SUBCASE("two-hour gap is interpolated") {
        std::istringstream in(
            "timestamp,F1,F2,F3,F4,F5,F6,F7,F8,F9,F10,F11,F12,F13,F14,F15,F16,F17,F18,F19,F20\n"
            "2022-01-03T00:00:00,0,0,0,0,0,0,0,0,0,10,0,0,0,0,0,0,0,0,0,0\n"
            "2022-01-03T03:00:00,3,0,0,0,0,0,0,0,0,40,0,0,0,0,0,0,0,0,0,0\n");
        const auto g = ingest_csv(in, ds.cell());
        REQUIRE(g.length() == 4);
        CHECK(g.values("F10")[1] == doctest::Approx(20.0));
        CHECK(g.values("F10")[2] == doctest::Approx(30.0));
        CHECK(g.values("F1")[1] == doctest::Approx(1.0));
    }
    SUBCASE("long gap is rejected") {
        std::istringstream in(
            "timestamp,F1,F2,F3,F4,F5,F6,F7,F8,F9,F10,F11,F12,F13,F14,F15,F16,F17,F18,F19,F20\n"
            "2022-01-03T00:00:00,0,0,0,0,0,0,0,0,0,10,0,0,0,0,0,0,0,0,0,0\n"
            "2022-01-03T05:00:00,3,0,0,0,0,0,0,0,0,40,0,0,0,0,0,0,0,0,0,0\n");
        CHECK_THROWS_WITH_AS(ingest_csv(in, ds.cell()), doctest::Contains("gap-too-long"), DataError);
    }
    SUBCASE("timestamps must increase") {
        std::istringstream in(
            "timestamp,F1,F2,F3,F4,F5,F6,F7,F8,F9,F10,F11,F12,F13,F14,F15,F16,F17,F18,F19,F20\n"
            "2022-01-03T01:00:00,0,0,0,0,0,0,0,0,0,10,0,0,0,0,0,0,0,0,0,0\n"
            "2022-01-03T00:00:00,3,0,0,0,0,0,0,0,0,40,0,0,0,0,0,0,0,0,0,0\n");
        CHECK_THROWS_AS(ingest_csv(in, ds.cell()), DataError);
    }
    SUBCASE("non-numeric field") {
        std::istringstream in(
            "timestamp,F1,F2,F3,F4,F5,F6,F7,F8,F9,F10,F11,F12,F13,F14,F15,F16,F17,F18,F19,F20\n"
            "2022-01-03T01:00:00,x,0,0,0,0,0,0,0,0,10,0,0,0,0,0,0,0,0,0,0\n");
        CHECK_THROWS_WITH_AS(ingest_csv(in, ds.cell()), doctest::Contains("malformed-row"), DataError);
    }
}

TEST_CASE("shortest round-trip number formatting") {
    auto rng = Rng::stream(2, "format");
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
        REQUIRE(std::stod(format_double(x)) == x);
    }
}

}  // TEST_SUITE
