#include "slacast/dataset.hpp"

#include "slacast/error.hpp"

#include <charconv>

namespace slacast {

std::string feature_label(int number) { return "F" + std::to_string(number); }

const std::vector<std::string>& all_feature_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> out;
        for (int i = 1; i <= kFeatureCount; ++i) out.push_back(feature_label(i));
        return out;
    }();
    return labels;
}

int feature_number(const std::string& label) {
    int n = 0;
    if (label.size() >= 2 && label[0] == 'F') {
        const auto res = std::from_chars(label.data() + 1, label.data() + label.size(), n);
        if (res.ec == std::errc{} && res.ptr == label.data() + label.size() && n >= 1 && n <= kFeatureCount)
            return n;
    }
    throw DataError("unknown-feature-label", "'" + label + "'");
}

CellDataset::CellDataset(CellId cell, TimeGrid grid, std::map<std::string, std::vector<double>> series)
    : cell_(std::move(cell)), grid_(grid), series_(std::move(series)) {
    if (!series_.contains(kTargetLabel))
        throw DataError("malformed-row", "dataset for " + cell_.str() + " lacks F10");
    for (const auto& [label, values] : series_) {
        if (values.size() != grid_.length())
            throw DataError("length-mismatch", label + " has " + std::to_string(values.size()) +
                                                   " values for a grid of " + std::to_string(grid_.length()));
    }
}

std::span<const double> CellDataset::values(const std::string& label) const {
    const auto it = series_.find(label);
    if (it == series_.end()) throw DataError("unknown-feature-label", "'" + label + "' not in " + cell_.str());
    return it->second;
}

FeatureSeries CellDataset::series(const std::string& label) const {
    const auto v = values(label);
    return {label, {v.begin(), v.end()}};
}

std::vector<std::string> CellDataset::labels() const {
    std::vector<std::string> out;
    for (const auto& [label, _] : series_) out.push_back(label);
    return out;
}

CellDataset CellDataset::slice(std::size_t offset, std::size_t count) const {
    std::map<std::string, std::vector<double>> out;
    for (const auto& [label, values] : series_) {
        const auto first = values.begin() + static_cast<std::ptrdiff_t>(offset);
        out.emplace(label, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count)));
    }
    return CellDataset(cell_, grid_.slice(offset, count), std::move(out));
}

DatasetSplit split_dataset(const CellDataset& ds, const SplitSpec& spec) {
    const std::size_t need = spec.total_hours();
    if (spec.train_weeks == 0 || spec.val_weeks == 0 || spec.test_weeks == 0)
        throw ConfigError("invalid-split", "every split needs at least one week");
    if (ds.length() < need)
        throw DataError("dataset-too-short", "split needs " + std::to_string(need) + " hours, dataset has " +
                                                 std::to_string(ds.length()));
    const std::size_t train = spec.train_weeks * kHoursPerWeek;
    const std::size_t val = spec.val_weeks * kHoursPerWeek;
    const std::size_t test = spec.test_weeks * kHoursPerWeek;
    return {ds.slice(0, train), ds.slice(train, val), ds.slice(train + val, test)};
}

}  // namespace slacast
