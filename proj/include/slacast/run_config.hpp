#pragma once

#include "slacast/calibration.hpp"
#include "slacast/dataset.hpp"
#include "slacast/features.hpp"
#include "slacast/folds.hpp"
#include "slacast/multistep.hpp"
#include "slacast/synth.hpp"
#include "slacast/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slacast {

inline constexpr int kRunConfigSchemaVersion = 1;

/// Hyperparameter axes; the grid is their Cartesian product.
struct GridSpace {
    std::vector<std::size_t> hidden{16, 32};
    std::vector<std::size_t> layers{1};
    std::vector<std::size_t> lookback{kDefaultLookback};
    std::vector<double> learning_rate{1e-3, 3e-3};
    std::vector<std::size_t> epochs{12};
    std::vector<double> l2{0.0};
    std::vector<std::size_t> batch_size{64};

    /// Points for a model with `input_width` columns, in a fixed order.
    [[nodiscard]] std::vector<GridPoint> points(std::size_t input_width, std::uint64_t seed) const;
};

/// Where cell data comes from.
struct DataSource {
    enum class Kind { synth, csv };
    Kind kind = Kind::synth;
    /// For csv: directory holding `<CELL>.csv` files.
    std::string directory;
    /// "builtin" for the reference neighborhood, a CSV path, or empty for none.
    std::string handover = "builtin";
};

struct RunConfig {
    int schema_version = kRunConfigSchemaVersion;
    std::uint64_t seed = 1;
    DataSource data;
    ScenarioConfig scenario = default_scenario_config();
    std::string target_cell = "GU14";
    SplitSpec split;
    std::size_t folds = 3;
    std::size_t fold_shift_hours = kDefaultFoldShift;
    FeatureOptions features;
    GridSpace grid;
    /// Loss weight used while choosing hyperparameters.
    double grid_search_w = 1.0;
    std::vector<double> sla_targets{0.03, 0.05};
    CalibrationSearch calibration;
    std::vector<Variant> variants = all_variants();
    HorizonPlan horizons;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
    /// 16 hex digits over the canonical JSON form.
    [[nodiscard]] std::string hash() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys and a wrong
/// schema_version are rejected (ConfigError).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Values taken from SLACAST_* environment variables.
struct EnvOverrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> jobs;
};

inline constexpr const char* kEnvPrefix = "SLACAST_";

/// Reads SLACAST_CONFIG, SLACAST_SEED, SLACAST_OUT and SLACAST_JOBS through
/// `getenv` (defaults to std::getenv). Throws ConfigError("bad-env-value").
EnvOverrides read_env_overrides(const std::function<const char*(const char*)>& getenv = {});

/// "sla3" for 0.03; used in artifact names.
std::string sla_tag(double p);
int sla_percent(double p);

}  // namespace slacast
