#pragma once

#include "slacast/dataset.hpp"
#include "slacast/handover.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace slacast {

/// Gap handling when hourly rows are missing.
struct GapPolicy {
    /// Gaps of at most this many missing hours are linearly interpolated;
    /// longer gaps raise DataError("gap-too-long").
    std::size_t max_interpolated_hours = 3;
};

/// Reads `timestamp,F1,...,F20`. The cell id comes from `cell`, or from the
/// file stem when it parses as a CellId.
///
/// Errors: malformed-row (wrong column set or non-numeric value),
/// non-hourly-timestamps (unaligned or non-increasing), gap-too-long.
CellDataset ingest_csv(const std::filesystem::path& path, const GapPolicy& policy = {});
CellDataset ingest_csv(std::istream& in, const CellId& cell, const GapPolicy& policy = {});

/// Writes the same schema. Values use round-trip precision.
void write_csv(const CellDataset& ds, std::ostream& out);
void write_csv(const CellDataset& ds, const std::filesystem::path& path);

/// `target,neighbor,direction,rate_percent`, direction in {in, out}.
HandoverMatrix read_handover_csv(const std::filesystem::path& path);
HandoverMatrix read_handover_csv(std::istream& in);
void write_handover_csv(const HandoverMatrix& ho, std::ostream& out);
void write_handover_csv(const HandoverMatrix& ho, const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace slacast
