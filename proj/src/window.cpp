#include "slacast/window.hpp"

#include "slacast/dataset.hpp"
#include "slacast/error.hpp"

namespace slacast {

WindowSet::WindowSet(Frame frame, std::size_t lookback, std::size_t target_column)
    : frame_(std::move(frame)), lookback_(lookback), target_column_(target_column) {
    if (lookback == 0) throw ConfigError("bad-lookback", "lookback must be at least 1");
    if (frame_.cols() > 0 && target_column >= static_cast<std::size_t>(frame_.cols()))
        throw ConfigError("bad-target-column", "target column outside frame");
}

std::vector<double> WindowSet::targets() const {
    std::vector<double> out(size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = target(t);
    return out;
}

Sample WindowSet::sample(std::size_t t) const {
    return {window(t), target(t), t, t + lookback_};
}

Frame to_frame(const CellDataset& ds, const std::vector<std::string>& features) {
    Frame frame(static_cast<Eigen::Index>(ds.length()), static_cast<Eigen::Index>(features.size()));
    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto values = ds.values(features[c]);
        for (std::size_t r = 0; r < values.size(); ++r)
            frame(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r];
    }
    return frame;
}

std::vector<Sample> windowize(const CellDataset& ds, const std::vector<std::string>& features, std::size_t lookback) {
    if (lookback == 0) throw ConfigError("bad-lookback", "lookback must be at least 1");
    for (const auto& f : features) (void)ds.values(f);  // validates labels
    // The target rides along as an extra column so WindowSet can index it.
    auto with_target = features;
    with_target.push_back(kTargetLabel);
    const Frame full = to_frame(ds, with_target);
    const WindowSet windows(full, lookback, features.size());
    std::vector<Sample> out;
    out.reserve(windows.size());
    for (std::size_t t = 0; t < windows.size(); ++t) {
        Sample s = windows.sample(t);
        s.window = s.window.leftCols(static_cast<Eigen::Index>(features.size())).eval();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace slacast
