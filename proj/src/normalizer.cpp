#include "slacast/normalizer.hpp"

#include "slacast/dataset.hpp"
#include "slacast/error.hpp"

#include <cmath>

namespace slacast {

Moments fit_moments(std::span<const double> values, const std::string& label) {
    if (values.empty()) throw DataError("empty-series", "cannot fit moments of empty series " + label);
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd >= kConstantEpsilon))
        throw DataError("constant-feature", "series " + label + " has zero variance");
    return {mean, sd};
}

const Moments& Normalizer::at(const std::string& label) const {
    const auto it = moments_.find(label);
    if (it == moments_.end()) throw DataError("unknown-feature-label", "normalizer has no '" + label + "'");
    return it->second;
}

double Normalizer::apply(const std::string& label, double raw) const {
    const auto& m = at(label);
    return (raw - m.mean) / m.std;
}

double Normalizer::invert(const std::string& label, double normalized) const {
    const auto& m = at(label);
    return normalized * m.std + m.mean;
}

std::vector<double> Normalizer::apply(const std::string& label, std::span<const double> raw) const {
    const auto& m = at(label);
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - m.mean) / m.std;
    return out;
}

std::vector<double> Normalizer::invert(const std::string& label, std::span<const double> normalized) const {
    const auto& m = at(label);
    std::vector<double> out(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) out[i] = normalized[i] * m.std + m.mean;
    return out;
}

CellDataset Normalizer::apply(const CellDataset& ds) const {
    auto series = ds.all();
    for (auto& [label, values] : series)
        if (has(label)) values = apply(label, values);
    return CellDataset(ds.cell(), ds.grid(), std::move(series));
}

CellDataset Normalizer::invert(const CellDataset& ds) const {
    auto series = ds.all();
    for (auto& [label, values] : series)
        if (has(label)) values = invert(label, values);
    return CellDataset(ds.cell(), ds.grid(), std::move(series));
}

Normalizer fit_normalizer(const CellDataset& train) {
    Normalizer out;
    for (const auto& [label, values] : train.all()) out.set(label, fit_moments(values, label));
    return out;
}

}  // namespace slacast
