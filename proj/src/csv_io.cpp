#include "slacast/csv_io.hpp"

#include "slacast/error.hpp"

#include <charconv>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string_view>

namespace slacast {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || field.empty())
        throw DataError("malformed-row",
                        "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
    return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("io-error", "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("io-error", "cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

CellDataset ingest_csv(const std::filesystem::path& path, const GapPolicy& policy) {
    auto in = open_in(path);
    CellId cell;
    try {
        cell = CellId::parse(path.stem().string());
    } catch (const DataError&) {
        cell = CellId("XX", 1, 1);
    }
    return ingest_csv(in, cell, policy);
}

CellDataset ingest_csv(std::istream& in, const CellId& cell, const GapPolicy& policy) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw DataError("malformed-row", "empty file");
    const auto header = split_fields(line);
    if (header.empty() || header[0] != "timestamp")
        throw DataError("malformed-row", "header must start with 'timestamp'");
    std::vector<std::string> labels;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string label(header[i]);
        feature_number(label);  // rejects unknown labels
        for (const auto& seen : labels)
            if (seen == label) throw DataError("malformed-row", "duplicate column " + label);
        labels.push_back(label);
    }
    for (const auto& required : all_feature_labels())
        if (std::find(labels.begin(), labels.end(), required) == labels.end())
            throw DataError("malformed-row", "missing column " + required);

    std::vector<HourStamp> stamps;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw DataError("malformed-row", "line " + std::to_string(line_no) + " has " +
                                                 std::to_string(fields.size()) + " fields, expected " +
                                                 std::to_string(header.size()));
        HourStamp stamp = 0;
        try {
            stamp = parse_timestamp(fields[0]);
        } catch (const DataError& e) {
            if (e.kind() == "non-hourly-timestamps") throw;
            throw DataError("malformed-row", "line " + std::to_string(line_no) + ": bad timestamp");
        }
        if (!stamps.empty() && stamp <= stamps.back())
            throw DataError("non-hourly-timestamps",
                            "line " + std::to_string(line_no) + ": timestamps must strictly increase");
        std::vector<double> row(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) row[i] = parse_double(fields[i + 1], line_no);
        stamps.push_back(stamp);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("malformed-row", "no data rows");

    const auto length = static_cast<std::size_t>(stamps.back() - stamps.front() + 1);
    std::map<std::string, std::vector<double>> series;
    for (const auto& label : labels) series[label].resize(length);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto idx = static_cast<std::size_t>(stamps[r] - stamps.front());
        if (r > 0) {
            const auto prev = static_cast<std::size_t>(stamps[r - 1] - stamps.front());
            const std::size_t missing = idx - prev - 1;
            if (missing > policy.max_interpolated_hours)
                throw DataError("gap-too-long", std::to_string(missing) + " missing hours after " +
                                                    format_timestamp(stamps[r - 1]));
            for (std::size_t k = 1; k <= missing; ++k) {
                const double frac = static_cast<double>(k) / static_cast<double>(missing + 1);
                for (std::size_t i = 0; i < labels.size(); ++i)
                    series[labels[i]][prev + k] = rows[r - 1][i] + frac * (rows[r][i] - rows[r - 1][i]);
            }
        }
        for (std::size_t i = 0; i < labels.size(); ++i) series[labels[i]][idx] = rows[r][i];
    }
    return CellDataset(cell, TimeGrid(stamps.front(), length), std::move(series));
}

void write_csv(const CellDataset& ds, std::ostream& out) {
    std::vector<std::string> labels;
    for (const auto& label : all_feature_labels())
        if (ds.has(label)) labels.push_back(label);
    out << "timestamp";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    std::vector<std::span<const double>> cols;
    for (const auto& l : labels) cols.push_back(ds.values(l));
    for (std::size_t t = 0; t < ds.length(); ++t) {
        out << format_timestamp(ds.grid().at(t));
        for (const auto& c : cols) out << ',' << format_double(c[t]);
        out << '\n';
    }
}

void write_csv(const CellDataset& ds, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_csv(ds, out);
}

HandoverMatrix read_handover_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_handover_csv(in);
}

HandoverMatrix read_handover_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("malformed-row", "empty handover file");
    const auto header = split_fields(line);
    if (header.size() != 4 || header[0] != "target" || header[1] != "neighbor" || header[2] != "direction" ||
        header[3] != "rate_percent")
        throw DataError("malformed-row", "handover header must be target,neighbor,direction,rate_percent");
    HandoverMatrix ho;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_fields(line);
        if (f.size() != 4) throw DataError("malformed-row", "line " + std::to_string(line_no) + ": expected 4 fields");
        HandoverDirection dir;
        if (f[2] == "in")
            dir = HandoverDirection::incoming;
        else if (f[2] == "out")
            dir = HandoverDirection::outgoing;
        else
            throw DataError("malformed-row", "line " + std::to_string(line_no) + ": direction must be in or out");
        ho.add(CellId::parse(f[0]), CellId::parse(f[1]), dir, parse_double(f[3], line_no));
    }
    return ho;
}

void write_handover_csv(const HandoverMatrix& ho, std::ostream& out) {
    out << "target,neighbor,direction,rate_percent\n";
    for (const auto& target : ho.targets())
        for (auto dir : {HandoverDirection::incoming, HandoverDirection::outgoing})
            for (const auto& e : ho.neighbors(target, dir))
                out << target.str() << ',' << e.neighbor.str() << ',' << to_string(dir) << ','
                    << format_double(e.rate_percent) << '\n';
}

void write_handover_csv(const HandoverMatrix& ho, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_handover_csv(ho, out);
}

}  // namespace slacast
