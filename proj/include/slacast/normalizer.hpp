#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace slacast {

class CellDataset;

/// Standard deviations below this are treated as constant.
inline constexpr double kConstantEpsilon = 1e-12;

struct Moments {
    double mean = 0.0;
    double std = 1.0;  // population convention
    bool operator==(const Moments&) const = default;
};

/// Population mean/std over `values`. Throws DataError("constant-feature")
/// when the std is below kConstantEpsilon, or ("empty-series") if empty.
Moments fit_moments(std::span<const double> values, const std::string& label = "");

/// Per-feature z-score transform. Fit on a training slice only.
class Normalizer {
public:
    Normalizer() = default;
    explicit Normalizer(std::map<std::string, Moments> moments) : moments_(std::move(moments)) {}

    void set(const std::string& label, Moments m) { moments_[label] = m; }
    [[nodiscard]] bool has(const std::string& label) const { return moments_.contains(label); }
    /// Throws DataError("unknown-feature-label").
    [[nodiscard]] const Moments& at(const std::string& label) const;
    [[nodiscard]] const std::map<std::string, Moments>& all() const noexcept { return moments_; }

    [[nodiscard]] double apply(const std::string& label, double raw) const;
    [[nodiscard]] double invert(const std::string& label, double normalized) const;
    [[nodiscard]] std::vector<double> apply(const std::string& label, std::span<const double> raw) const;
    [[nodiscard]] std::vector<double> invert(const std::string& label,
                                             std::span<const double> normalized) const;

    /// Normalizes every series of `ds` that this normalizer knows.
    [[nodiscard]] CellDataset apply(const CellDataset& ds) const;
    [[nodiscard]] CellDataset invert(const CellDataset& ds) const;

    bool operator==(const Normalizer&) const = default;

private:
    std::map<std::string, Moments> moments_;
};

/// Fits every series of the training slice.
Normalizer fit_normalizer(const CellDataset& train);

}  // namespace slacast
