#include "slacast/pipeline.hpp"

#include "slacast/csv_io.hpp"
#include "slacast/error.hpp"
#include "slacast/metrics.hpp"
#include "slacast/parallel.hpp"
#include "slacast/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace slacast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";

std::string hex_hash(const std::string& content) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("io-error", "cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("io-error", "cannot write " + tmp.string());
        out << content;
        if (!out) throw DataError("io-error", "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

[[noreturn]] void rethrow_as(ErrorClass cls, const std::string& kind, const std::string& message) {
    switch (cls) {
        case ErrorClass::config: throw ConfigError(kind, message);
        case ErrorClass::data: throw DataError(kind, message);
        case ErrorClass::divergence: throw DivergenceError(kind, message);
        case ErrorClass::constraint: throw ConstraintError(kind, message);
    }
    throw DataError(kind, message);
}

std::string strip_kind(const Error& e) {
    const std::string what = e.what();
    const std::string prefix = e.kind() + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

json point_to_json(const GridPoint& p) {
    return {{"hidden", p.spec.hidden},          {"layers", p.spec.layers},       {"lookback", p.spec.lookback},
            {"input_width", p.spec.input_width}, {"learning_rate", p.config.learning_rate},
            {"epochs", p.config.epochs},         {"l2", p.config.l2},             {"batch_size", p.config.batch_size},
            {"seed", p.config.seed}};
}

GridPoint point_from_json(const json& j) {
    GridPoint p;
    p.spec.hidden = j.at("hidden").get<std::size_t>();
    p.spec.layers = j.at("layers").get<std::size_t>();
    p.spec.lookback = j.at("lookback").get<std::size_t>();
    p.spec.input_width = j.at("input_width").get<std::size_t>();
    p.config.learning_rate = j.at("learning_rate").get<double>();
    p.config.epochs = j.at("epochs").get<std::size_t>();
    p.config.l2 = j.at("l2").get<double>();
    p.config.batch_size = j.at("batch_size").get<std::size_t>();
    p.config.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json trial_to_json(const WeightTrial& t) {
    return {{"w", t.w},
            {"violation_rate", t.violation_rate},
            {"volume", t.volume},
            {"conditional_volume", t.conditional_volume}};
}

WeightTrial trial_from_json(const json& j) {
    return {j.at("w").get<double>(), j.at("violation_rate").get<double>(), j.at("volume").get<double>(),
            j.at("conditional_volume").get<double>()};
}

bool uses_handover(Variant v) { return v == Variant::handover || v == Variant::all; }

}  // namespace

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> s{Stage::synth, Stage::features, Stage::grid, Stage::calibrate,
                                      Stage::train, Stage::eval,     Stage::report};
    return s;
}

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::synth: return "synth";
        case Stage::features: return "features";
        case Stage::grid: return "grid";
        case Stage::calibrate: return "calibrate";
        case Stage::train: return "train";
        case Stage::eval: return "eval";
        case Stage::report: return "report";
    }
    return "?";
}

Stage parse_stage(const std::string& name) {
    for (auto s : all_stages())
        if (name == to_string(s)) return s;
    throw ConfigError("unknown-stage", "'" + name + "' (expected synth, features, grid, calibrate, train, eval or report)");
}

Pipeline::Pipeline(RunConfig config, fs::path out, std::size_t jobs, std::ostream* log)
    : config_(std::move(config)), out_(std::move(out)), jobs_(std::max<std::size_t>(jobs, 1)), log_(log) {
    config_.scenario.seed = config_.seed;
    config_.validate();
    hash_ = config_.hash();
    const fs::path manifest = out_ / kManifestFile;
    if (!fs::exists(manifest)) return;
    json j;
    try {
        j = json::parse(read_file(manifest));
    } catch (const json::exception& e) {
        throw DataError("bad-manifest", manifest.string() + ": " + e.what());
    }
    const auto other = j.value("config_hash", std::string());
    if (other != hash_)
        throw ConfigError("config-mismatch", out_.string() + " holds artifacts of config " + other + ", not " + hash_ +
                                                 "; use a fresh output directory");
    for (const auto& [name, rec] : j.at("stages").items()) {
        StageRecord r;
        r.key = rec.at("key").get<std::string>();
        r.files = rec.at("files").get<std::map<std::string, std::string>>();
        manifest_[parse_stage(name)] = std::move(r);
    }
}

void Pipeline::log(const std::string& line) const {
    if (log_ != nullptr) *log_ << line << std::endl;
}

json Pipeline::stamp() const { return {{"config_hash", hash_}}; }

std::vector<std::string> Pipeline::artifacts() const {
    std::vector<std::string> out;
    for (auto s : all_stages()) {
        const auto it = manifest_.find(s);
        if (it == manifest_.end()) continue;
        for (const auto& [rel, _] : it->second.files) out.push_back(rel);
    }
    return out;
}

std::string Pipeline::stage_key(Stage stage) const {
    std::string text = std::string(to_string(stage)) + "|" + hash_;
    for (auto s : all_stages()) {
        if (s == stage) break;
        const auto& rec = manifest_.at(s);
        text += "|" + rec.key;
        for (const auto& [rel, h] : rec.files) text += "|" + rel + "=" + h;
    }
    return hex_hash(text);
}

void Pipeline::save_manifest() const {
    json stages = json::object();
    for (const auto& [s, rec] : manifest_) stages[to_string(s)] = {{"key", rec.key}, {"files", rec.files}};
    const json j = {{"format", "slacast-manifest"},
                    {"version", 1},
                    {"config_hash", hash_},
                    {"config", config_to_json(config_)},
                    {"stages", stages}};
    write_file(out_ / kManifestFile, j.dump(2) + "\n");
}

void Pipeline::write_artifact(Stage stage, const std::string& rel, const std::string& content) {
    write_file(out_ / rel, content);
    manifest_[stage].files[rel] = hex_hash(content);
}

std::string Pipeline::read_artifact(const std::string& rel) const { return read_file(out_ / rel); }

bool Pipeline::load_cached(Stage stage) {
    const auto it = manifest_.find(stage);
    if (it == manifest_.end() || it->second.key != stage_key(stage)) return false;
    for (const auto& [rel, h] : it->second.files) {
        const fs::path p = out_ / rel;
        if (!fs::exists(p) || hex_hash(read_file(p)) != h) return false;
    }
    try {
        switch (stage) {
            case Stage::synth: load_synth(); break;
            case Stage::features: load_features(); break;
            case Stage::grid: load_grid(); break;
            case Stage::calibrate: load_calibrate(); break;
            case Stage::train: load_train(); break;
            case Stage::eval: load_eval(); break;
            case Stage::report: break;
        }
    } catch (const std::exception& e) {
        log(std::string(to_string(stage)) + ": cache unreadable, recomputing (" + e.what() + ")");
        return false;
    }
    return true;
}

void Pipeline::compute(Stage stage) {
    switch (stage) {
        case Stage::synth: run_synth(); break;
        case Stage::features: run_features(); break;
        case Stage::grid: run_grid(); break;
        case Stage::calibrate: run_calibrate(); break;
        case Stage::train: run_train(); break;
        case Stage::eval: run_eval(); break;
        case Stage::report: run_report(); break;
    }
}

void Pipeline::ensure(Stage stage) {
    if (done_[stage]) return;
    const auto& stages = all_stages();
    const auto pos = std::find(stages.begin(), stages.end(), stage);
    if (pos != stages.begin()) ensure(*(pos - 1));

    if (load_cached(stage)) {
        log(std::string(to_string(stage)) + ": cached");
        done_[stage] = true;
        return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    manifest_[stage] = StageRecord{stage_key(stage), {}};
    try {
        compute(stage);
    } catch (const Error& e) {
        manifest_.erase(stage);
        rethrow_as(e.error_class(), e.kind(), std::string("stage ") + to_string(stage) + ": " + strip_kind(e));
    } catch (const std::exception& e) {
        manifest_.erase(stage);
        throw DataError("io-error", std::string("stage ") + to_string(stage) + ": " + e.what());
    }
    save_manifest();
    done_[stage] = true;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, ": done in %.1f s", secs);
    log(std::string(to_string(stage)) + buf);
}

void Pipeline::run(Stage last) { ensure(last); }

// ---- synth ----

void Pipeline::run_synth() {
    const auto& d = config_.data;
    handover_.reset();
    if (d.handover == "builtin") handover_ = table2_handover_matrix();
    else if (!d.handover.empty()) handover_ = read_handover_csv(fs::path(d.handover));

    region_.clear();
    if (d.kind == DataSource::Kind::synth) {
        region_ = generate_region(config_.scenario, handover_ ? *handover_ : HandoverMatrix{});
    } else {
        if (!fs::is_directory(d.directory)) throw DataError("io-error", "no such directory " + d.directory);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(d.directory))
            if (entry.path().extension() == ".csv" && entry.path().stem() != "handover") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto ds = ingest_csv(f);
            region_.emplace(ds.cell(), std::move(ds));
        }
    }
    if (!region_.contains(CellId::parse(config_.target_cell)))
        throw DataError("missing-target-cell", "no data for target cell " + config_.target_cell);

    for (const auto& [cell, ds] : region_) {
        std::ostringstream s;
        write_csv(ds, s);
        write_artifact(Stage::synth, "data/" + cell.str() + ".csv", s.str());
    }
    if (handover_) {
        std::ostringstream s;
        write_handover_csv(*handover_, s);
        write_artifact(Stage::synth, "data/handover.csv", s.str());
    }
}

void Pipeline::load_synth() {
    region_.clear();
    handover_.reset();
    for (const auto& [rel, _] : manifest_.at(Stage::synth).files) {
        if (rel == "data/handover.csv") {
            handover_ = read_handover_csv(out_ / rel);
        } else {
            auto ds = ingest_csv(out_ / rel);
            region_.emplace(ds.cell(), std::move(ds));
        }
    }
}

const std::map<CellId, CellDataset>& Pipeline::region() {
    ensure(Stage::synth);
    return region_;
}

const HandoverMatrix* Pipeline::handover() {
    ensure(Stage::synth);
    return handover_ ? &*handover_ : nullptr;
}

const CellDataset& Pipeline::target() { return region().at(CellId::parse(config_.target_cell)); }

SplitRows Pipeline::split_rows() {
    const auto& ds = target();
    const auto h = kHoursPerWeek;
    SplitRows r;
    r.train_end = config_.split.train_weeks * h;
    r.val_end = r.train_end + config_.split.val_weeks * h;
    r.test_end = r.val_end + config_.split.test_weeks * h;
    if (r.test_end > ds.length())
        throw DataError("dataset-too-short", std::to_string(ds.length()) + " hours cannot hold a " +
                                                 std::to_string(r.test_end) + "-hour split");
    return r;
}

// ---- features ----

void Pipeline::run_features() {
    const auto& ds = target();
    const auto split = split_dataset(ds, config_.split);
    const HandoverMatrix* ho = handover();

    std::vector<Variant> needed = config_.variants;
    if (std::find(needed.begin(), needed.end(), Variant::univariate) == needed.end())
        needed.insert(needed.begin(), Variant::univariate);

    recipes_.clear();
    json recipes = json::object();
    for (auto v : needed) {
        if (uses_handover(v) && ho == nullptr)
            throw ConfigError("missing-handover",
                              std::string("variant ") + to_string(v) + " requested but the run has no handover matrix");
        recipes_[v] = build_recipe(v, split.train, ho, config_.features);
        recipes[to_string(v)] = recipe_to_json(recipes_[v]);
    }
    json j = stamp();
    j["target_cell"] = config_.target_cell;
    j["recipes"] = recipes;
    write_artifact(Stage::features, "features/recipes.json", j.dump(2) + "\n");

    std::vector<std::string> skipped;
    const auto corr = correlation_with_target(split.train, &skipped);
    const auto selected = select_ran_features(split.train, config_.features.correlation_threshold);
    std::ostringstream csv;
    csv << "label,abs_pearson,selected\n";
    for (const auto& label : all_feature_labels()) {
        const auto it = corr.find(label);
        if (it == corr.end()) continue;
        const bool sel = std::find(selected.begin(), selected.end(), label) != selected.end();
        csv << label << ',' << format_double(it->second) << ',' << (sel ? 1 : 0) << '\n';
    }
    for (const auto& label : skipped) csv << label << ",,0\n";
    write_artifact(Stage::features, "features/correlation.csv", csv.str());

    FeatureRecipe peak;
    peak.variant = Variant::peak;
    peak.target = ds.cell();
    peak.peak = detect_peak_hours(split.train.values(kTargetLabel), split.train.grid(),
                                  config_.features.peak_threshold, config_.features.weekend_days);
    json pj = stamp();
    pj["peak_profile"] = recipe_to_json(peak).at("peak");
    write_artifact(Stage::features, "features/peak_profile.json", pj.dump(2) + "\n");

    build_tables();
}

void Pipeline::load_features() {
    const json j = json::parse(read_artifact("features/recipes.json"));
    if (j.at("config_hash") != hash_) throw ConfigError("config-mismatch", "features/recipes.json");
    recipes_.clear();
    for (const auto& [name, r] : j.at("recipes").items()) recipes_[parse_variant(name)] = recipe_from_json(r);
    build_tables();
}

void Pipeline::build_tables() {
    tables_.clear();
    for (const auto& [v, r] : recipes_) tables_.emplace(v, assemble_inputs(r, target(), &region_));
}

const FeatureRecipe& Pipeline::recipe(Variant v) {
    ensure(Stage::features);
    const auto it = recipes_.find(v);
    if (it == recipes_.end()) throw ConfigError("unknown-variant", std::string(to_string(v)) + " is not configured");
    return it->second;
}

const FeatureTable& Pipeline::table(Variant v) {
    (void)recipe(v);
    return tables_.at(v);
}

// ---- grid search ----

void Pipeline::run_grid() {
    const auto rows = split_rows();
    const Frame frame = table(Variant::univariate).values.topRows(static_cast<Eigen::Index>(rows.val_end));
    const auto plan =
        make_folds(TimeGrid(target().grid().at(0), rows.val_end), config_.folds, config_.fold_shift_hours);
    const auto points = config_.grid.points(1, config_.seed);
    const auto result = grid_search(points, plan,
                                    frame_fold_evaluator(frame, {kTargetLabel}, LossConfig{config_.grid_search_w, 0.5}),
                                    jobs_);
    json folds = json::array();
    for (const auto& f : plan.folds)
        folds.push_back({{"train", {f.train.begin, f.train.end}}, {"val", {f.val.begin, f.val.end}}});
    json scores = json::array();
    for (const auto& s : result.scores) {
        json fl = json::array();
        for (double l : s.fold_losses) fl.push_back(finite_or_null(l));
        scores.push_back({{"point", point_to_json(s.point)},
                          {"key", s.point.encode()},
                          {"mean_val_loss", finite_or_null(s.mean_val_loss)},
                          {"fold_losses", fl}});
    }
    json j = stamp();
    j["w"] = config_.grid_search_w;
    j["folds"] = folds;
    j["best"] = point_to_json(result.best);
    j["scores"] = scores;
    write_artifact(Stage::grid, "grid/grid_search.json", j.dump(2) + "\n");
    grid_ = result;
}

void Pipeline::load_grid() {
    const json j = json::parse(read_artifact("grid/grid_search.json"));
    if (j.at("config_hash") != hash_) throw ConfigError("config-mismatch", "grid/grid_search.json");
    GridSearchResult r;
    r.best = point_from_json(j.at("best"));
    for (const auto& s : j.at("scores")) {
        GridScore g;
        g.point = point_from_json(s.at("point"));
        const auto& m = s.at("mean_val_loss");
        g.mean_val_loss = m.is_null() ? std::numeric_limits<double>::infinity() : m.get<double>();
        for (const auto& l : s.at("fold_losses"))
            g.fold_losses.push_back(l.is_null() ? std::numeric_limits<double>::infinity() : l.get<double>());
        r.scores.push_back(std::move(g));
    }
    grid_ = std::move(r);
}

const GridSearchResult& Pipeline::grid() {
    ensure(Stage::grid);
    return *grid_;
}

// ---- model helpers ----

ForecastModel Pipeline::train_model(const FeatureRecipe& recipe, const FeatureTable& table, double w, double p) const {
    const auto& best = grid_->best;
    const auto rows = SplitRows{config_.split.train_weeks * kHoursPerWeek,
                                (config_.split.train_weeks + config_.split.val_weeks) * kHoursPerWeek, 0};
    ForecastModel m;
    m.recipe = recipe;
    m.recipe.lookback = best.spec.lookback;
    m.spec = best.spec;
    m.spec.input_width = recipe.width();
    m.loss = LossConfig{w, p};
    m.config_hash = hash_;

    const auto columns = recipe.columns();
    const auto L = static_cast<Eigen::Index>(m.spec.lookback);
    const auto train_end = static_cast<Eigen::Index>(rows.train_end);
    const auto val_end = static_cast<Eigen::Index>(rows.val_end);
    m.normalizer = fit_column_normalizer(columns, table.values.topRows(train_end));
    const Frame all = normalize_inputs(m.normalizer, columns, table.values);
    const WindowSet train_w(all.topRows(train_end), m.spec.lookback);
    const WindowSet val_w(all.middleRows(train_end - L, val_end - train_end + L), m.spec.lookback);
    auto result = train(m.spec, train_w, &val_w, best.config, m.loss);
    m.params = std::move(result.params);
    return m;
}

WeightTrial Pipeline::score_on_validation(const ForecastModel& model, const FeatureTable& table) const {
    const auto train_end = static_cast<Eigen::Index>(config_.split.train_weeks * kHoursPerWeek);
    const auto val_end = static_cast<Eigen::Index>((config_.split.train_weeks + config_.split.val_weeks) * kHoursPerWeek);
    const auto L = static_cast<Eigen::Index>(model.spec.lookback);
    const WindowSet windows(normalize_inputs(model, table.values.middleRows(train_end - L, val_end - train_end + L)),
                            model.spec.lookback);
    std::vector<std::size_t> idx(windows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const auto pred = model.normalizer.invert(kTargetLabel, forward_batch(model.params, windows, idx));
    const auto col = static_cast<Eigen::Index>(table.column_index(kTargetLabel));
    std::vector<double> actual;
    for (Eigen::Index r = train_end; r < val_end; ++r) actual.push_back(table.values(r, col));
    const auto vol = overprovisioning_volume(pred, actual);
    return {model.loss.w, sla_violation_rate(pred, actual) / 100.0, vol.unconditional, vol.conditional};
}

// ---- calibration ----

void Pipeline::run_calibrate() {
    (void)grid();
    const auto& recipe_u = recipe(Variant::univariate);
    const auto& table_u = table(Variant::univariate);
    for (double p : config_.sla_targets) {
        const auto evaluate = [&](double w) -> WeightTrial {
            const std::string key = format_double(w);
            const std::string rel = "calibrate/trials/w_" + key + ".json";
            {
                std::lock_guard lock(trials_mutex_);
                if (const auto it = trials_.find(key); it != trials_.end()) {
                    manifest_[Stage::calibrate].files[rel] = hex_hash(read_artifact(rel));
                    return it->second.first;
                }
            }
            // Resume from a trial left by an interrupted run of the same config.
            if (fs::exists(out_ / rel)) {
                try {
                    const std::string text = read_artifact(rel);
                    const json j = json::parse(text);
                    if (j.at("config_hash") == hash_) {
                        auto model = deserialize_model(j.at("model").dump());
                        const auto trial = trial_from_json(j.at("trial"));
                        std::lock_guard lock(trials_mutex_);
                        trials_.emplace(key, std::make_pair(trial, std::move(model)));
                        manifest_[Stage::calibrate].files[rel] = hex_hash(text);
                        return trial;
                    }
                } catch (const std::exception&) {
                }
            }
            auto model = train_model(recipe_u, table_u, w, p);
            const auto trial = score_on_validation(model, table_u);
            json j = stamp();
            j["trial"] = trial_to_json(trial);
            j["model"] = json::parse(serialize_model(model));
            std::lock_guard lock(trials_mutex_);
            write_artifact(Stage::calibrate, rel, j.dump(1) + "\n");
            trials_.emplace(key, std::make_pair(trial, std::move(model)));
            char buf[128];
            std::snprintf(buf, sizeof buf, "  w=%-10.4g val violation %.2f%%  volume %.3f", w,
                          100.0 * trial.violation_rate, trial.volume);
            log(buf);
            return trial;
        };
        log("calibrate: target " + std::to_string(sla_percent(p)) + "%");
        const auto result = calibrate_weight(p, evaluate, config_.calibration, jobs_);
        calibration_[sla_percent(p)] = result;

        json trace = json::array();
        for (const auto& t : result.trace) trace.push_back(trial_to_json(t));
        json j = stamp();
        j["sla_percent"] = sla_percent(p);
        j["target_rate"] = result.target_rate;
        j["tolerance"] = config_.calibration.tolerance;
        j["w"] = result.w;
        j["violation_rate"] = result.violation_rate;
        j["volume"] = result.volume;
        j["satisfied"] = result.satisfied;
        j["trace"] = trace;
        write_artifact(Stage::calibrate, "calibrate/" + sla_tag(p) + ".json", j.dump(2) + "\n");
    }
}

void Pipeline::load_calibrate() {
    calibration_.clear();
    for (const auto& [rel, _] : manifest_.at(Stage::calibrate).files) {
        const json j = json::parse(read_artifact(rel));
        if (j.at("config_hash") != hash_) throw ConfigError("config-mismatch", rel);
        if (rel.rfind("calibrate/trials/", 0) == 0) {
            const auto trial = trial_from_json(j.at("trial"));
            trials_.insert_or_assign(format_double(trial.w),
                                     std::make_pair(trial, deserialize_model(j.at("model").dump())));
            continue;
        }
        CalibrationResult r;
        r.target_rate = j.at("target_rate").get<double>();
        r.w = j.at("w").get<double>();
        r.violation_rate = j.at("violation_rate").get<double>();
        r.volume = j.at("volume").get<double>();
        r.satisfied = j.at("satisfied").get<bool>();
        for (const auto& t : j.at("trace")) r.trace.push_back(trial_from_json(t));
        calibration_[j.at("sla_percent").get<int>()] = std::move(r);
    }
}

const CalibrationResult& Pipeline::calibration(double p) {
    ensure(Stage::calibrate);
    const auto it = calibration_.find(sla_percent(p));
    if (it == calibration_.end())
        throw ConfigError("invalid-target", std::to_string(sla_percent(p)) + "% is not a configured SLA target");
    return it->second;
}

// ---- training ----

bool Pipeline::needs_neighbors() const {
    if (config_.horizons.handover_policy != ExogenousPolicy::neighbor_recursive) return false;
    return std::any_of(config_.variants.begin(), config_.variants.end(), uses_handover);
}

std::vector<CellId> Pipeline::neighbor_cells() {
    std::set<CellId> cells;
    for (auto v : config_.variants) {
        if (!uses_handover(v)) continue;
        const auto& r = recipe(v);
        for (const auto& [c, _] : r.incoming_weights) cells.insert(c);
        for (const auto& [c, _] : r.outgoing_weights) cells.insert(c);
    }
    return {cells.begin(), cells.end()};
}

void Pipeline::run_train() {
    struct Job {
        double p;
        Variant variant;
        std::optional<CellId> neighbor;
    };
    std::vector<Job> jobs;
    for (double p : config_.sla_targets) {
        for (auto v : config_.variants)
            if (v != Variant::univariate) jobs.push_back({p, v, std::nullopt});
        if (needs_neighbors())
            for (const auto& c : neighbor_cells()) jobs.push_back({p, Variant::univariate, c});
    }
    for (double p : config_.sla_targets) (void)calibration(p);

    // Neighbor recipes and tables are fitted on each neighbor's own train slice.
    std::map<CellId, std::pair<FeatureRecipe, FeatureTable>> neighbor_inputs;
    for (const auto& job : jobs) {
        if (!job.neighbor || neighbor_inputs.contains(*job.neighbor)) continue;
        const auto it = region_.find(*job.neighbor);
        if (it == region_.end()) throw DataError("missing-neighbor-series", "no data for " + job.neighbor->str());
        const auto split = split_dataset(it->second, config_.split);
        auto r = build_recipe(Variant::univariate, split.train, nullptr, config_.features);
        auto t = assemble_inputs(r, it->second, &region_);
        neighbor_inputs.emplace(*job.neighbor, std::make_pair(std::move(r), std::move(t)));
    }

    std::vector<ForecastModel> trained(jobs.size());
    parallel_for(jobs.size(), jobs_, [&](std::size_t i) {
        const auto& job = jobs[i];
        const double w = calibration_.at(sla_percent(job.p)).w;
        if (job.neighbor) {
            const auto& [r, t] = neighbor_inputs.at(*job.neighbor);
            trained[i] = train_model(r, t, w, job.p);
        } else {
            trained[i] = train_model(recipes_.at(job.variant), tables_.at(job.variant), w, job.p);
        }
    });

    models_.clear();
    neighbors_.clear();
    for (double p : config_.sla_targets) {
        const int pct = sla_percent(p);
        if (std::find(config_.variants.begin(), config_.variants.end(), Variant::univariate) != config_.variants.end()) {
            auto m = trials_.at(format_double(calibration_.at(pct).w)).second;
            m.loss.sla_target = p;
            models_[{Variant::univariate, pct}] = std::move(m);
        }
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const int pct = sla_percent(jobs[i].p);
        if (jobs[i].neighbor) neighbors_[pct].models[*jobs[i].neighbor] = std::move(trained[i]);
        else models_[{jobs[i].variant, pct}] = std::move(trained[i]);
    }
    for (const auto& [key, m] : models_)
        write_artifact(Stage::train, "models/" + std::string(to_string(key.first)) + "_sla" + std::to_string(key.second) + ".json",
                       serialize_model(m));
    for (const auto& [pct, ctx] : neighbors_)
        for (const auto& [cell, m] : ctx.models)
            write_artifact(Stage::train, "models/neighbors/" + cell.str() + "_sla" + std::to_string(pct) + ".json",
                           serialize_model(m));
}

void Pipeline::load_train() {
    models_.clear();
    neighbors_.clear();
    for (const auto& [rel, _] : manifest_.at(Stage::train).files) {
        auto m = load_model(out_ / rel);
        if (m.config_hash != hash_) throw ConfigError("config-mismatch", rel);
        const int pct = sla_percent(m.loss.sla_target);
        if (rel.rfind("models/neighbors/", 0) == 0) neighbors_[pct].models[m.recipe.target] = std::move(m);
        else models_[{m.recipe.variant, pct}] = std::move(m);
    }
}

const ForecastModel& Pipeline::model(Variant v, double p) {
    ensure(Stage::train);
    const auto it = models_.find({v, sla_percent(p)});
    if (it == models_.end())
        throw DataError("missing-model", std::string("no ") + to_string(v) + " model at " +
                                             std::to_string(sla_percent(p)) + "% SLA");
    return it->second;
}

const NeighborContext* Pipeline::neighbor_context(double p) {
    ensure(Stage::train);
    const auto it = neighbors_.find(sla_percent(p));
    if (it == neighbors_.end()) return nullptr;
    auto& ctx = it->second;
    if (ctx.f10.empty())
        for (const auto& [cell, _] : ctx.models) {
            const auto v = region_.at(cell).values(kTargetLabel);
            ctx.f10[cell] = std::vector<double>(v.begin(), v.end());
        }
    return &ctx;
}

std::vector<double> Pipeline::predict(Variant v, double p, std::size_t origin, std::size_t steps,
                                      const HorizonPlan& plan) {
    const auto& m = model(v, p);
    const NeighborContext* ctx = nullptr;
    if (plan.handover_policy == ExogenousPolicy::neighbor_recursive && m.recipe.uses_handover()) {
        ctx = neighbor_context(p);
        if (ctx == nullptr)
            throw ConfigError("missing-neighbor-model",
                              "neighbor-recursive forecasts need horizons.handover_policy = neighbor-recursive in "
                              "the config so neighbor models are trained");
    }
    return predict_multistep(m, table(v), origin, steps, plan, ctx);
}

// ---- evaluation ----

void Pipeline::run_eval() {
    const auto rows = split_rows();
    ReportInputs in;
    in.config_hash = hash_;
    in.seed = config_.seed;
    in.target_cell = config_.target_cell;
    in.volume_unit = config_.scenario.volume_unit;
    in.variants = config_.variants;
    for (double p : config_.sla_targets) in.sla_percents.push_back(sla_percent(p));
    in.plan = config_.horizons;
    for (double p : config_.sla_targets) {
        const auto& c = calibration(p);
        in.calibration.push_back({sla_percent(p), c.w, 100.0 * c.violation_rate, c.volume, c.satisfied});
        for (auto v : config_.variants) in.models[{v, sla_percent(p)}] = &model(v, p);
        if (needs_neighbors()) in.neighbors[sla_percent(p)] = neighbor_context(p);
    }
    for (auto v : config_.variants) in.tables[v] = &table(v);
    in.test_begin = rows.val_end;
    in.test_end = rows.test_end;
    in.jobs = jobs_;

    std::map<std::pair<Variant, int>, std::map<std::size_t, HorizonSeries>> series;
    report_ = build_report(in, &series);
    write_artifact(Stage::eval, "eval/metrics.json", report_to_json(*report_).dump(2) + "\n");

    const std::size_t h = config_.horizons.horizons.front();
    for (int pct : in.sla_percents) {
        const auto& first = series.at({config_.variants.front(), pct}).at(h);
        std::vector<std::pair<std::string, std::vector<double>>> preds;
        for (auto v : config_.variants) preds.emplace_back(to_string(v), series.at({v, pct}).at(h).pred);
        write_artifact(Stage::eval, "eval/plot_sla" + std::to_string(pct) + ".csv",
                       plot_csv(first.stamps, first.actual, preds));
    }
}

void Pipeline::load_eval() {
    const json j = json::parse(read_artifact("eval/metrics.json"));
    if (j.at("config_hash") != hash_) throw ConfigError("config-mismatch", "eval/metrics.json");
    report_ = report_from_json(j);
}

const EvalReport& Pipeline::report() {
    ensure(Stage::eval);
    return *report_;
}

void Pipeline::run_report() {
    const auto& r = report();
    write_artifact(Stage::report, "report/report.json", report_to_json(r).dump(2) + "\n");
    write_artifact(Stage::report, "report/table_single_step.csv", single_step_csv(r));
    write_artifact(Stage::report, "report/table_multistep.csv", multistep_csv(r));
    for (const auto& [rel, _] : manifest_.at(Stage::eval).files)
        if (rel.rfind("eval/plot_", 0) == 0)
            write_artifact(Stage::report, "report/" + rel.substr(5), read_artifact(rel));
}

}  // namespace slacast
