#pragma once

#include "slacast/calibration.hpp"
#include "slacast/handover.hpp"
#include "slacast/model.hpp"
#include "slacast/report.hpp"
#include "slacast/run_config.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace slacast {

enum class Stage { synth, features, grid, calibrate, train, eval, report };

const std::vector<Stage>& all_stages();
const char* to_string(Stage stage);
/// Throws ConfigError("unknown-stage").
Stage parse_stage(const std::string& name);

/// Row ranges of the chronological split on the target grid.
struct SplitRows {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
    std::size_t test_end = 0;
};

/// The full workflow over one output directory.
///
/// Every stage writes its artifacts under `out` and records them, with
/// content hashes, in `out/manifest.json`. A stage whose key (stage name,
/// config hash, upstream stage keys) and file hashes still match is loaded
/// instead of recomputed. A directory created under a different config is
/// refused with ConfigError("config-mismatch"). Errors escaping a stage keep
/// their class and carry the stage name in the message.
class Pipeline {
public:
    Pipeline(RunConfig config, std::filesystem::path out, std::size_t jobs = 1, std::ostream* log = nullptr);

    [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::string& config_hash() const noexcept { return hash_; }
    [[nodiscard]] const std::filesystem::path& out() const noexcept { return out_; }

    /// Runs every stage up to and including `last`.
    void run(Stage last = Stage::report);

    const std::map<CellId, CellDataset>& region();
    /// Null when the run has no handover matrix.
    const HandoverMatrix* handover();
    const CellDataset& target();
    [[nodiscard]] SplitRows split_rows();

    const FeatureRecipe& recipe(Variant v);
    const FeatureTable& table(Variant v);
    const GridSearchResult& grid();
    const CalibrationResult& calibration(double p);
    const ForecastModel& model(Variant v, double p);
    const EvalReport& report();

    /// Recursive forecasts of the target cell from `origin` (row index of
    /// the first predicted hour) under `plan`'s handover policy.
    std::vector<double> predict(Variant v, double p, std::size_t origin, std::size_t steps, const HorizonPlan& plan);

    /// Artifact paths relative to `out`, in manifest order.
    [[nodiscard]] std::vector<std::string> artifacts() const;

private:
    struct StageRecord {
        std::string key;
        std::map<std::string, std::string> files;  // relative path -> content hash
    };

    void ensure(Stage stage);
    void compute(Stage stage);
    bool load_cached(Stage stage);
    [[nodiscard]] std::string stage_key(Stage stage) const;
    void write_artifact(Stage stage, const std::string& rel, const std::string& content);
    [[nodiscard]] std::string read_artifact(const std::string& rel) const;
    void save_manifest() const;
    void log(const std::string& line) const;

    void run_synth();
    void load_synth();
    void run_features();
    void load_features();
    void build_tables();
    void run_grid();
    void load_grid();
    void run_calibrate();
    void load_calibrate();
    void run_train();
    void load_train();
    void run_eval();
    void load_eval();
    void run_report();

    [[nodiscard]] nlohmann::json stamp() const;
    ForecastModel train_model(const FeatureRecipe& recipe, const FeatureTable& table, double w, double p) const;
    WeightTrial score_on_validation(const ForecastModel& model, const FeatureTable& table) const;
    const NeighborContext* neighbor_context(double p);
    [[nodiscard]] bool needs_neighbors() const;
    std::vector<CellId> neighbor_cells();

    RunConfig config_;
    std::string hash_;
    std::filesystem::path out_;
    std::size_t jobs_;
    std::ostream* log_;

    std::map<Stage, StageRecord> manifest_;
    std::map<Stage, bool> done_;

    std::map<CellId, CellDataset> region_;
    std::optional<HandoverMatrix> handover_;
    std::map<Variant, FeatureRecipe> recipes_;
    std::map<Variant, FeatureTable> tables_;
    std::optional<GridSearchResult> grid_;
    std::map<int, CalibrationResult> calibration_;
    std::map<std::string, std::pair<WeightTrial, ForecastModel>> trials_;  // keyed by formatted w
    std::mutex trials_mutex_;
    std::map<std::pair<Variant, int>, ForecastModel> models_;
    std::map<int, NeighborContext> neighbors_;
    std::optional<EvalReport> report_;
};

}  // namespace slacast
