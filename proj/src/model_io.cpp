#include "slacast/model.hpp"

#include "slacast/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace slacast {

using nlohmann::json;

Normalizer fit_column_normalizer(const std::vector<std::string>& columns, const Frame& train_raw) {
    Normalizer norm;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (is_boolean_column(columns[c])) continue;
        const Eigen::VectorXd col = train_raw.col(static_cast<Eigen::Index>(c));
        norm.set(columns[c], fit_moments(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                         columns[c]));
    }
    return norm;
}

Frame normalize_inputs(const Normalizer& normalizer, const std::vector<std::string>& columns, const Frame& raw) {
    if (static_cast<std::size_t>(raw.cols()) != columns.size())
        throw DataError("shape-mismatch", "frame has " + std::to_string(raw.cols()) + " columns, recipe " +
                                              std::to_string(columns.size()));
    Frame out = raw;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (is_boolean_column(columns[c])) continue;
        const auto& m = normalizer.at(columns[c]);
        auto col = out.col(static_cast<Eigen::Index>(c));
        col = ((col.array() - m.mean) / m.std).matrix();
    }
    return out;
}

Frame normalize_inputs(const ForecastModel& model, const Frame& raw) {
    return normalize_inputs(model.normalizer, model.recipe.columns(), raw);
}

namespace {

json peak_to_json(const PeakProfile& p) {
    return {{"peak_hours", p.peak_hours},
            {"occurrence", p.occurrence},
            {"threshold", p.threshold},
            {"weekend_days", p.weekend_days},
            {"days", p.days}};
}

PeakProfile peak_from_json(const json& j) {
    PeakProfile p;
    p.peak_hours = j.at("peak_hours").get<std::set<int>>();
    p.occurrence = j.at("occurrence").get<std::array<double, 24>>();
    p.threshold = j.at("threshold").get<double>();
    p.weekend_days = j.at("weekend_days").get<std::set<int>>();
    p.days = j.at("days").get<std::size_t>();
    return p;
}

json weights_to_json(const std::vector<std::pair<CellId, double>>& w) {
    json out = json::array();
    for (const auto& [cell, weight] : w) out.push_back({cell.str(), weight});
    return out;
}

std::vector<std::pair<CellId, double>> weights_from_json(const json& j) {
    std::vector<std::pair<CellId, double>> out;
    for (const auto& e : j) out.emplace_back(CellId::parse(e.at(0).get<std::string>()), e.at(1).get<double>());
    return out;
}

}  // namespace

json recipe_to_json(const FeatureRecipe& r) {
    return {{"variant", to_string(r.variant)},
            {"target", r.target.str()},
            {"ran_labels", r.ran_labels},
            {"peak", r.peak ? peak_to_json(*r.peak) : json(nullptr)},
            {"incoming_weights", weights_to_json(r.incoming_weights)},
            {"outgoing_weights", weights_to_json(r.outgoing_weights)},
            {"lookback", r.lookback}};
}

FeatureRecipe recipe_from_json(const json& j) {
    FeatureRecipe r;
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.target = CellId::parse(j.at("target").get<std::string>());
    r.ran_labels = j.at("ran_labels").get<std::vector<std::string>>();
    if (!j.at("peak").is_null()) r.peak = peak_from_json(j.at("peak"));
    r.incoming_weights = weights_from_json(j.at("incoming_weights"));
    r.outgoing_weights = weights_from_json(j.at("outgoing_weights"));
    r.lookback = j.at("lookback").get<std::size_t>();
    return r;
}

std::string serialize_model(const ForecastModel& model) {
    json norm = json::object();
    for (const auto& [label, m] : model.normalizer.all()) norm[label] = {m.mean, m.std};
    const auto& flat = model.params.flat();
    json j = {{"format", kModelFormat},
              {"version", kModelFormatVersion},
              {"config_hash", model.config_hash},
              {"spec",
               {{"input_width", model.spec.input_width},
                {"hidden", model.spec.hidden},
                {"layers", model.spec.layers},
                {"lookback", model.spec.lookback}}},
              {"loss", {{"w", model.loss.w}, {"sla_target", model.loss.sla_target}}},
              {"normalizer", norm},
              {"recipe", recipe_to_json(model.recipe)},
              {"params", std::vector<double>(flat.data(), flat.data() + flat.size())}};
    return j.dump(1) + "\n";
}

ForecastModel deserialize_model(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("format") != kModelFormat) throw DataError("bad-model-file", "not a model file");
        if (j.at("version").get<int>() != kModelFormatVersion)
            throw DataError("bad-model-file", "unsupported model version " + j.at("version").dump());
        ForecastModel m;
        m.config_hash = j.at("config_hash").get<std::string>();
        const auto& s = j.at("spec");
        m.spec = {s.at("input_width").get<std::size_t>(), s.at("hidden").get<std::size_t>(),
                  s.at("layers").get<std::size_t>(), s.at("lookback").get<std::size_t>()};
        m.loss = {j.at("loss").at("w").get<double>(), j.at("loss").at("sla_target").get<double>()};
        for (const auto& [label, v] : j.at("normalizer").items())
            m.normalizer.set(label, {v.at(0).get<double>(), v.at(1).get<double>()});
        m.recipe = recipe_from_json(j.at("recipe"));
        const auto flat = j.at("params").get<std::vector<double>>();
        m.params = LstmParams(m.spec);
        if (flat.size() != m.params.size())
            throw DataError("bad-model-file", "parameter count does not match the network shape");
        for (std::size_t i = 0; i < flat.size(); ++i) m.params.flat()[static_cast<Eigen::Index>(i)] = flat[i];
        if (m.recipe.width() != m.spec.input_width)
            throw DataError("bad-model-file", "recipe width does not match the network input");
        return m;
    } catch (const json::exception& e) {
        throw DataError("bad-model-file", e.what());
    }
}

void save_model(const ForecastModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("io-error", "cannot write " + path.string());
    out << serialize_model(model);
}

ForecastModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("io-error", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

}  // namespace slacast
