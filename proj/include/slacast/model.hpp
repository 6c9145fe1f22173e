#pragma once

#include "slacast/features.hpp"
#include "slacast/loss.hpp"
#include "slacast/lstm.hpp"
#include "slacast/normalizer.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace slacast {

/// A trained network together with everything needed to run it on raw data.
struct ForecastModel {
    LstmSpec spec;
    LstmParams params;
    Normalizer normalizer;  // keyed by recipe column; Boolean columns absent
    FeatureRecipe recipe;
    LossConfig loss;
    std::string config_hash;  // run that produced the model, may be empty

    bool operator==(const ForecastModel&) const = default;
};

/// Normalizes the raw recipe columns with the model's normalizer.
Frame normalize_inputs(const ForecastModel& model, const Frame& raw);
Frame normalize_inputs(const Normalizer& normalizer, const std::vector<std::string>& columns, const Frame& raw);

/// Fits moments of every non-Boolean column on `train_raw`.
Normalizer fit_column_normalizer(const std::vector<std::string>& columns, const Frame& train_raw);

inline constexpr const char* kModelFormat = "slacast-model";
inline constexpr int kModelFormatVersion = 1;

/// JSON text; doubles are written in shortest round-trip form so a
/// save/load cycle is bit-exact.
std::string serialize_model(const ForecastModel& model);
/// Throws DataError("bad-model-file").
ForecastModel deserialize_model(const std::string& text);

/// Recipe encoding shared by model files and feature artifacts.
nlohmann::json recipe_to_json(const FeatureRecipe& recipe);
FeatureRecipe recipe_from_json(const nlohmann::json& j);

void save_model(const ForecastModel& model, const std::filesystem::path& path);
ForecastModel load_model(const std::filesystem::path& path);

}  // namespace slacast
