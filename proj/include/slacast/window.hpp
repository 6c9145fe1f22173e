#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace slacast {

class CellDataset;

/// Model-input matrix: one row per hour, one column per input feature.
using Frame = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultLookback = 24;

/// One supervised example: `lookback` consecutive rows and the next-hour
/// target.
struct Sample {
    Frame window;
    double target = 0.0;
    std::size_t first_index = 0;   // grid index of window row 0
    std::size_t target_index = 0;  // first_index + lookback
};

/// All sliding windows of a frame. Column `target_column` of the row right
/// after each window is its target. Sample t covers rows [t, t + lookback).
class WindowSet {
public:
    WindowSet(Frame frame, std::size_t lookback, std::size_t target_column = 0);

    [[nodiscard]] std::size_t size() const noexcept {
        return frame_.rows() > static_cast<Eigen::Index>(lookback_)
                   ? static_cast<std::size_t>(frame_.rows()) - lookback_
                   : 0;
    }
    [[nodiscard]] bool empty() const noexcept { return size() == 0; }
    [[nodiscard]] std::size_t lookback() const noexcept { return lookback_; }
    [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(frame_.cols()); }
    [[nodiscard]] const Frame& frame() const noexcept { return frame_; }

    [[nodiscard]] auto window(std::size_t t) const {
        return frame_.middleRows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(lookback_));
    }
    [[nodiscard]] double target(std::size_t t) const {
        return frame_(static_cast<Eigen::Index>(t + lookback_), static_cast<Eigen::Index>(target_column_));
    }
    [[nodiscard]] std::vector<double> targets() const;
    [[nodiscard]] Sample sample(std::size_t t) const;

private:
    Frame frame_;
    std::size_t lookback_;
    std::size_t target_column_;
};

/// Stacks the requested series of `ds` column-wise in the given order.
/// Throws DataError("unknown-feature-label").
Frame to_frame(const CellDataset& ds, const std::vector<std::string>& features);

/// Windows over the listed features; the target is always F10.
/// Throws ConfigError("bad-lookback") for lookback 0.
std::vector<Sample> windowize(const CellDataset& ds, const std::vector<std::string>& features,
                              std::size_t lookback = kDefaultLookback);

}  // namespace slacast
