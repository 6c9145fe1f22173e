#include "slacast/handover.hpp"

#include "slacast/error.hpp"

#include <algorithm>
#include <cmath>

namespace slacast {

namespace {

const std::vector<HandoverEntry>& empty_entries() {
    static const std::vector<HandoverEntry> none;
    return none;
}

}  // namespace

const char* to_string(HandoverDirection dir) { return dir == HandoverDirection::incoming ? "in" : "out"; }

void HandoverMatrix::add(const CellId& target, const CellId& neighbor, HandoverDirection dir, double rate_percent) {
    if (!(rate_percent >= 0.0) || !std::isfinite(rate_percent))
        throw DataError("inconsistent-handover-matrix", "negative or non-finite rate for " + target.str());
    if (target == neighbor)
        throw DataError("inconsistent-handover-matrix", target.str() + " listed as its own neighbor");
    auto& list = (dir == HandoverDirection::incoming ? incoming_ : outgoing_)[target];
    if (std::any_of(list.begin(), list.end(), [&](const HandoverEntry& e) { return e.neighbor == neighbor; }))
        throw DataError("inconsistent-handover-matrix",
                        "duplicate " + std::string(to_string(dir)) + " entry " + target.str() + "/" + neighbor.str());
    double sum = rate_percent;
    for (const auto& e : list) sum += e.rate_percent;
    if (sum > 100.0 + 1e-9)
        throw DataError("inconsistent-handover-matrix",
                        std::string(to_string(dir)) + " rates of " + target.str() + " exceed 100%");
    list.push_back({neighbor, rate_percent});
}

const std::vector<HandoverEntry>& HandoverMatrix::neighbors(const CellId& target, HandoverDirection dir) const {
    const auto& table = dir == HandoverDirection::incoming ? incoming_ : outgoing_;
    const auto it = table.find(target);
    return it == table.end() ? empty_entries() : it->second;
}

double HandoverMatrix::rate(const CellId& target, const CellId& neighbor, HandoverDirection dir) const {
    for (const auto& e : neighbors(target, dir))
        if (e.neighbor == neighbor) return e.rate_percent;
    return 0.0;
}

double HandoverMatrix::total(const CellId& target, HandoverDirection dir) const {
    double sum = 0.0;
    for (const auto& e : neighbors(target, dir)) sum += e.rate_percent;
    return sum;
}

std::set<CellId> HandoverMatrix::targets() const {
    std::set<CellId> out;
    for (const auto& [t, list] : incoming_)
        if (!list.empty()) out.insert(t);
    for (const auto& [t, list] : outgoing_)
        if (!list.empty()) out.insert(t);
    return out;
}

std::set<CellId> HandoverMatrix::cells() const {
    std::set<CellId> out = targets();
    for (const auto* table : {&incoming_, &outgoing_})
        for (const auto& [t, list] : *table)
            for (const auto& e : list) out.insert(e.neighbor);
    return out;
}

std::vector<std::pair<CellId, double>> HandoverMatrix::weights(const CellId& target, HandoverDirection dir) const {
    const auto& list = neighbors(target, dir);
    const double sum = total(target, dir);
    std::vector<std::pair<CellId, double>> out;
    if (sum <= 0.0) return out;
    for (const auto& e : list) out.emplace_back(e.neighbor, e.rate_percent / sum);
    return out;
}

HandoverMatrix table2_handover_matrix() {
    const CellId gu14 = CellId::parse("GU14");
    static const std::pair<const char*, double> incoming[] = {
        {"GU12", 66.79}, {"MS34", 6.08}, {"VO14", 5.69}, {"SY24", 4.68}, {"VO12", 4.45},
        {"GU24", 3.36},  {"MS37", 2.05}, {"SY22", 1.99}, {"GU13", 1.49}, {"GU22", 1.15},
    };
    static const std::pair<const char*, double> outgoing[] = {
        {"GU12", 26.86}, {"SY24", 17.24}, {"VO14", 12.48}, {"GU17", 8.72}, {"MS34", 8.31},
        {"GU24", 4.54},  {"GU13", 3.96},  {"VO12", 1.88},  {"VO13", 1.88}, {"RE37", 1.55},
    };
    HandoverMatrix ho;
    for (const auto& [cell, rate] : incoming) ho.add(gu14, CellId::parse(cell), HandoverDirection::incoming, rate);
    for (const auto& [cell, rate] : outgoing) ho.add(gu14, CellId::parse(cell), HandoverDirection::outgoing, rate);
    return ho;
}

}  // namespace slacast
