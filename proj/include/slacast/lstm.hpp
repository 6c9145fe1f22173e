#pragma once

#include "slacast/window.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace slacast {

struct LstmSpec {
    std::size_t input_width = 1;
    std::size_t hidden = 16;
    std::size_t layers = 1;
    std::size_t lookback = kDefaultLookback;

    /// Throws ConfigError("invalid-lstm-spec").
    void validate() const;
    bool operator==(const LstmSpec&) const = default;
};

/// All trainable weights in one flat vector.
///
/// Per layer l (input width D_l, D_0 = input_width, D_l = hidden above):
///   gate matrix, 4H x (D_l + H), column-major, gate rows ordered
///   input, forget, candidate, output; then the 4H gate bias.
/// Finally the head: H weights and one bias.
class LstmParams {
public:
    LstmParams() = default;
    explicit LstmParams(const LstmSpec& spec);  // zero-initialized

    /// Uniform in +-1/sqrt(H), drawn from a stream named after the tensor.
    static LstmParams random(const LstmSpec& spec, std::uint64_t seed);

    [[nodiscard]] const LstmSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(flat_.size()); }
    [[nodiscard]] Eigen::VectorXd& flat() noexcept { return flat_; }
    [[nodiscard]] const Eigen::VectorXd& flat() const noexcept { return flat_; }

    [[nodiscard]] std::size_t layer_input(std::size_t layer) const;
    [[nodiscard]] Eigen::Map<Eigen::MatrixXd> gates(std::size_t layer);
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> gates(std::size_t layer) const;
    [[nodiscard]] Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
    [[nodiscard]] Eigen::Map<Eigen::VectorXd> head_weights();
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> head_weights() const;
    [[nodiscard]] double& head_bias() { return flat_[flat_.size() - 1]; }
    [[nodiscard]] double head_bias() const { return flat_[flat_.size() - 1]; }

    bool operator==(const LstmParams& other) const {
        return spec_ == other.spec_ && flat_.size() == other.flat_.size() && flat_ == other.flat_;
    }

private:
    [[nodiscard]] std::size_t layer_offset(std::size_t layer) const;

    LstmSpec spec_;
    Eigen::VectorXd flat_;
};

/// Number of scalars in a network of this shape.
std::size_t parameter_count(const LstmSpec& spec);

/// Prediction for one window (lookback x input_width, normalized scale).
/// Throws DataError("shape-mismatch").
double forward(const LstmParams& params, const Eigen::Ref<const Frame>& window);

/// Predictions for windows `indices` of `windows`.
std::vector<double> forward_batch(const LstmParams& params, const WindowSet& windows,
                                  std::span<const std::size_t> indices);

/// Mean wmae over the selected windows plus `l2 * ||params||^2`. When
/// `grad` is non-null it receives the full-length gradient computed by
/// backpropagation through the whole window.
double objective(const LstmParams& params, const WindowSet& windows, std::span<const std::size_t> indices,
                 double w, double l2, Eigen::VectorXd* grad);

}  // namespace slacast
