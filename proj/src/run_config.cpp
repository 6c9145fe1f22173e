#include "slacast/run_config.hpp"

#include "slacast/error.hpp"
#include "slacast/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace slacast {

using nlohmann::json;

std::vector<GridPoint> GridSpace::points(std::size_t input_width, std::uint64_t seed) const {
    std::vector<GridPoint> out;
    for (auto h : hidden)
        for (auto n : layers)
            for (auto L : lookback)
                for (double lr : learning_rate)
                    for (auto e : epochs)
                        for (double l2v : l2)
                            for (auto b : batch_size) {
                                GridPoint p;
                                p.spec = {input_width, h, n, L};
                                p.config = {lr, e, l2v, b, seed};
                                out.push_back(p);
                            }
    return out;
}

namespace {

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* field) {
    if (v.empty()) throw ConfigError("invalid-config", std::string(field) + " must not be empty");
}

json scenario_to_json(const ScenarioConfig& s) {
    json cells = json::array();
    for (const auto& c : s.cells) cells.push_back(c.str());
    json profiles = json::object();
    for (const auto& [cell, p] : s.profiles)
        profiles[cell.str()] = {{"level", p.level}, {"amplitude", p.amplitude}, {"peak_hour", p.peak_hour}};
    return {{"cells", cells},
            {"weeks", s.weeks},
            {"start", format_timestamp(s.start)},
            {"profiles", profiles},
            {"weekday_weekend_ratio", s.weekday_weekend_ratio},
            {"trend_per_week", s.trend_per_week},
            {"spike_probability", s.spike_probability},
            {"spike_magnitude", s.spike_magnitude},
            {"rho", s.rho},
            {"nuisance_correlation", s.nuisance_correlation},
            {"noise_scale", s.noise_scale},
            {"noise_persistence", s.noise_persistence},
            {"coupling_share", s.coupling_share},
            {"volume_unit", s.volume_unit}};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError("invalid-config", where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.contains(key)) throw ConfigError("unknown-key", where + "." + key);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ScenarioConfig scenario_from_json(const json& j, ScenarioConfig s) {
    check_keys(j,
               {"cells", "weeks", "start", "profiles", "weekday_weekend_ratio", "trend_per_week", "spike_probability",
                "spike_magnitude", "rho", "nuisance_correlation", "noise_scale", "noise_persistence",
                "coupling_share", "volume_unit"},
               "scenario");
    if (j.contains("cells")) {
        s.cells.clear();
        for (const auto& c : j.at("cells")) s.cells.push_back(CellId::parse(c.get<std::string>()));
    }
    read(j, "weeks", s.weeks);
    if (j.contains("start")) s.start = parse_timestamp(j.at("start").get<std::string>());
    if (j.contains("profiles")) {
        s.profiles.clear();
        for (const auto& [cell, p] : j.at("profiles").items()) {
            check_keys(p, {"level", "amplitude", "peak_hour"}, "scenario.profiles." + cell);
            DailyProfile d;
            read(p, "level", d.level);
            read(p, "amplitude", d.amplitude);
            read(p, "peak_hour", d.peak_hour);
            s.profiles[CellId::parse(cell)] = d;
        }
    }
    read(j, "weekday_weekend_ratio", s.weekday_weekend_ratio);
    read(j, "trend_per_week", s.trend_per_week);
    read(j, "spike_probability", s.spike_probability);
    read(j, "spike_magnitude", s.spike_magnitude);
    read(j, "rho", s.rho);
    read(j, "nuisance_correlation", s.nuisance_correlation);
    read(j, "noise_scale", s.noise_scale);
    read(j, "noise_persistence", s.noise_persistence);
    read(j, "coupling_share", s.coupling_share);
    read(j, "volume_unit", s.volume_unit);
    return s;
}

}  // namespace

void RunConfig::validate() const {
    if (schema_version != kRunConfigSchemaVersion)
        throw ConfigError("schema-version", "unsupported schema_version " + std::to_string(schema_version));
    if (data.kind == DataSource::Kind::synth) {
        scenario.validate();
    } else if (data.directory.empty()) {
        throw ConfigError("invalid-config", "data.directory is required for csv input");
    }
    (void)CellId::parse(target_cell);
    if (split.train_weeks == 0 || split.val_weeks == 0 || split.test_weeks == 0)
        throw ConfigError("invalid-split", "every split needs at least one week");
    if (folds == 0 || fold_shift_hours == 0) throw ConfigError("infeasible-plan", "folds and fold_shift_hours must be >= 1");
    if (!(features.correlation_threshold > 0.0 && features.correlation_threshold <= 1.0))
        throw ConfigError("invalid-config", "features.correlation_threshold must be in (0, 1]");
    if (!(features.peak_threshold >= 0.0 && features.peak_threshold < 1.0))
        throw ConfigError("invalid-config", "features.peak_threshold must be in [0, 1)");
    for (int d : features.weekend_days)
        if (d < 0 || d > 6) throw ConfigError("invalid-config", "features.weekend_days must be in 0..6");
    require_nonempty(grid.hidden, "grid.hidden");
    require_nonempty(grid.layers, "grid.layers");
    require_nonempty(grid.lookback, "grid.lookback");
    require_nonempty(grid.learning_rate, "grid.learning_rate");
    require_nonempty(grid.epochs, "grid.epochs");
    require_nonempty(grid.l2, "grid.l2");
    require_nonempty(grid.batch_size, "grid.batch_size");
    for (const auto& p : grid.points(1, seed)) {
        p.spec.validate();
        p.config.validate();
    }
    if (!(grid_search_w > 0.0) || !std::isfinite(grid_search_w))
        throw ConfigError("nonpositive-weight", "grid_search_w must be positive");
    require_nonempty(sla_targets, "sla_targets");
    std::set<int> seen;
    for (double p : sla_targets) {
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("invalid-target", "sla_targets must lie in (0, 1)");
        if (std::abs(p * 100.0 - sla_percent(p)) > 1e-9)
            throw ConfigError("invalid-target", "sla_targets must be whole percentages");
        if (!seen.insert(sla_percent(p)).second) throw ConfigError("invalid-target", "duplicate SLA target");
    }
    if (calibration.grid.empty()) throw ConfigError("empty-search-range", "calibration.grid must not be empty");
    require_nonempty(variants, "variants");
    horizons.validate();
}

json config_to_json(const RunConfig& c) {
    json variants = json::array();
    for (auto v : c.variants) variants.push_back(to_string(v));
    return {
        {"schema_version", c.schema_version},
        {"seed", c.seed},
        {"data",
         {{"source", c.data.kind == DataSource::Kind::synth ? "synth" : "csv"},
          {"directory", c.data.directory},
          {"handover", c.data.handover}}},
        {"scenario", scenario_to_json(c.scenario)},
        {"target_cell", c.target_cell},
        {"split", {{"train_weeks", c.split.train_weeks}, {"val_weeks", c.split.val_weeks}, {"test_weeks", c.split.test_weeks}}},
        {"folds", {{"k", c.folds}, {"shift_hours", c.fold_shift_hours}}},
        {"features",
         {{"correlation_threshold", c.features.correlation_threshold},
          {"peak_threshold", c.features.peak_threshold},
          {"weekend_days", c.features.weekend_days}}},
        {"grid",
         {{"hidden", c.grid.hidden},
          {"layers", c.grid.layers},
          {"lookback", c.grid.lookback},
          {"learning_rate", c.grid.learning_rate},
          {"epochs", c.grid.epochs},
          {"l2", c.grid.l2},
          {"batch_size", c.grid.batch_size},
          {"w", c.grid_search_w}}},
        {"sla_targets", c.sla_targets},
        {"calibration",
         {{"grid", c.calibration.grid},
          {"refine_steps", c.calibration.refine_steps},
          {"tolerance", c.calibration.tolerance}}},
        {"variants", variants},
        {"horizons", {{"steps", c.horizons.horizons}, {"handover_policy", to_string(c.horizons.handover_policy)}}},
    };
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        check_keys(j,
                   {"schema_version", "seed", "data", "scenario", "target_cell", "split", "folds", "features", "grid",
                    "sla_targets", "calibration", "variants", "horizons"},
                   "config");
        if (!j.contains("schema_version")) throw ConfigError("schema-version", "schema_version is required");
        c.schema_version = j.at("schema_version").get<int>();
        if (c.schema_version != kRunConfigSchemaVersion)
            throw ConfigError("schema-version", "unsupported schema_version " + std::to_string(c.schema_version));
        read(j, "seed", c.seed);
        if (j.contains("data")) {
            const auto& d = j.at("data");
            check_keys(d, {"source", "directory", "handover"}, "data");
            if (d.contains("source")) {
                const auto src = d.at("source").get<std::string>();
                if (src == "synth") c.data.kind = DataSource::Kind::synth;
                else if (src == "csv") c.data.kind = DataSource::Kind::csv;
                else throw ConfigError("invalid-config", "data.source must be synth or csv");
            }
            read(d, "directory", c.data.directory);
            read(d, "handover", c.data.handover);
        }
        if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"), c.scenario);
        read(j, "target_cell", c.target_cell);
        if (j.contains("split")) {
            const auto& s = j.at("split");
            check_keys(s, {"train_weeks", "val_weeks", "test_weeks"}, "split");
            read(s, "train_weeks", c.split.train_weeks);
            read(s, "val_weeks", c.split.val_weeks);
            read(s, "test_weeks", c.split.test_weeks);
        }
        if (j.contains("folds")) {
            const auto& f = j.at("folds");
            check_keys(f, {"k", "shift_hours"}, "folds");
            read(f, "k", c.folds);
            read(f, "shift_hours", c.fold_shift_hours);
        }
        if (j.contains("features")) {
            const auto& f = j.at("features");
            check_keys(f, {"correlation_threshold", "peak_threshold", "weekend_days"}, "features");
            read(f, "correlation_threshold", c.features.correlation_threshold);
            read(f, "peak_threshold", c.features.peak_threshold);
            read(f, "weekend_days", c.features.weekend_days);
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            check_keys(g, {"hidden", "layers", "lookback", "learning_rate", "epochs", "l2", "batch_size", "w"}, "grid");
            read(g, "hidden", c.grid.hidden);
            read(g, "layers", c.grid.layers);
            read(g, "lookback", c.grid.lookback);
            read(g, "learning_rate", c.grid.learning_rate);
            read(g, "epochs", c.grid.epochs);
            read(g, "l2", c.grid.l2);
            read(g, "batch_size", c.grid.batch_size);
            read(g, "w", c.grid_search_w);
        }
        read(j, "sla_targets", c.sla_targets);
        if (j.contains("calibration")) {
            const auto& k = j.at("calibration");
            check_keys(k, {"grid", "refine_steps", "tolerance"}, "calibration");
            read(k, "grid", c.calibration.grid);
            read(k, "refine_steps", c.calibration.refine_steps);
            read(k, "tolerance", c.calibration.tolerance);
        }
        if (j.contains("variants")) {
            c.variants.clear();
            for (const auto& v : j.at("variants")) c.variants.push_back(parse_variant(v.get<std::string>()));
        }
        if (j.contains("horizons")) {
            const auto& h = j.at("horizons");
            check_keys(h, {"steps", "handover_policy"}, "horizons");
            read(h, "steps", c.horizons.horizons);
            if (h.contains("handover_policy"))
                c.horizons.handover_policy = parse_policy(h.at("handover_policy").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError("invalid-config", e.what());
    } catch (const DataError& e) {
        throw ConfigError("invalid-config", e.what());
    }
    c.scenario.seed = c.seed;
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config-not-found", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid-config", path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(*this).dump())));
    return buf;
}

EnvOverrides read_env_overrides(const std::function<const char*(const char*)>& getenv) {
    const auto get = [&](const char* name) -> std::optional<std::string> {
        const std::string key = std::string(kEnvPrefix) + name;
        const char* v = getenv ? getenv(key.c_str()) : std::getenv(key.c_str());
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
    const auto number = [](const std::string& name, const std::string& text) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(text, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != text.size() || text.front() == '-')
            throw ConfigError("bad-env-value", std::string(kEnvPrefix) + name + "=" + text);
        return static_cast<std::uint64_t>(v);
    };
    EnvOverrides env;
    env.config = get("CONFIG");
    env.out = get("OUT");
    if (auto s = get("SEED")) env.seed = number("SEED", *s);
    if (auto s = get("JOBS")) env.jobs = static_cast<std::size_t>(number("JOBS", *s));
    return env;
}

int sla_percent(double p) { return static_cast<int>(std::lround(p * 100.0)); }

std::string sla_tag(double p) { return "sla" + std::to_string(sla_percent(p)); }

}  // namespace slacast
