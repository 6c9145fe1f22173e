#pragma once

#include "slacast/cell_id.hpp"

#include <map>
#include <set>
#include <vector>

namespace slacast {

enum class HandoverDirection { incoming, outgoing };

struct HandoverEntry {
    CellId neighbor;
    double rate_percent = 0.0;
    bool operator==(const HandoverEntry&) const = default;
};

/// Per-target neighbor handover rates, listed in descending order of rate as
/// they were inserted.
class HandoverMatrix {
public:
    /// Throws DataError("inconsistent-handover-matrix") for negative rates,
    /// self loops, duplicates, or a per-direction total above 100.
    void add(const CellId& target, const CellId& neighbor, HandoverDirection dir, double rate_percent);

    [[nodiscard]] const std::vector<HandoverEntry>& neighbors(const CellId& target,
                                                              HandoverDirection dir) const;
    /// 0 when the pair is not listed.
    [[nodiscard]] double rate(const CellId& target, const CellId& neighbor, HandoverDirection dir) const;
    [[nodiscard]] double total(const CellId& target, HandoverDirection dir) const;

    /// Targets with at least one listed neighbor.
    [[nodiscard]] std::set<CellId> targets() const;
    /// Every cell that appears as a target or a neighbor.
    [[nodiscard]] std::set<CellId> cells() const;
    [[nodiscard]] bool empty() const noexcept { return incoming_.empty() && outgoing_.empty(); }

    /// Neighbor weights renormalized to sum to 1 (empty if none listed).
    [[nodiscard]] std::vector<std::pair<CellId, double>> weights(const CellId& target,
                                                                 HandoverDirection dir) const;

    bool operator==(const HandoverMatrix&) const = default;

private:
    std::map<CellId, std::vector<HandoverEntry>> incoming_;
    std::map<CellId, std::vector<HandoverEntry>> outgoing_;
};

/// GU14 neighborhood rates (10 incoming, 10 outgoing neighbors).
HandoverMatrix table2_handover_matrix();

const char* to_string(HandoverDirection dir);

}  // namespace slacast
