#include "ellipsoid_lab/io.hpp"

#include "ellipsoid_lab/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace ellipsoid_lab {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename Int>
Int parse_integer(std::string_view text, const char* column) {
    Int value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw IoError(std::string("malformed integer in column '") + column + "': '" + std::string(text) + "'");
    }
    return value;
}

bool parse_flag(std::string_view text) {
    if (text == "1") return true;
    if (text == "0") return false;
    throw IoError("malformed success flag '" + std::string(text) + "'");
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

void expect_header(std::istream& in, std::string_view header) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty CSV: missing header");
    }
    if (strip_cr(line) != header) {
        throw IoError("unexpected CSV header '" + line + "', expected '" + std::string(header) + "'");
    }
}

nlohmann::json json_real(double value) {
    // JSON has no NaN/inf; null marks a missing certificate.
    return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc()) {
        throw IoError("format_real: conversion failed");
    }
    return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value, std::chars_format::general);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw IoError("malformed real '" + std::string(text) + "'");
    }
    return value;
}

std::string summary_path_for(const std::string& records_path) {
    const std::filesystem::path p(records_path);
    if (p.has_extension()) {
        std::filesystem::path out = p;
        out.replace_extension(".summary" + p.extension().string());
        return out.string();
    }
    return records_path + ".summary";
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records, bool include_wall_time) {
    out << kRecordsHeader << '\n';
    for (const auto& r : records) {
        out << r.d << ',' << r.m << ',' << r.trial << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
            << format_real(r.n_min_eig) << ',' << format_real(r.k_norm) << ',' << format_real(r.max_residual) << ','
            << format_real(r.a_norm) << ',' << format_real(r.m_min_eig) << ','
            << format_real(include_wall_time ? r.wall_ms : 0.0) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const PhaseTable& table) {
    out << kSummaryHeader << '\n';
    for (const auto& c : table.cells) {
        out << c.d << ',' << c.m << ',' << c.trials << ',' << c.successes << ',' << format_real(c.rate) << ','
            << format_real(c.wilson_lo) << ',' << format_real(c.wilson_hi) << '\n';
    }
}

void write_records_json(std::ostream& out, const std::vector<TrialRecord>& records, bool include_wall_time) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"d", r.d},
                       {"m", r.m},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"success", r.success},
                       {"status", std::string(to_string(r.status))},
                       {"n_min_eig", json_real(r.n_min_eig)},
                       {"k_norm", json_real(r.k_norm)},
                       {"max_residual", json_real(r.max_residual)},
                       {"a_norm", json_real(r.a_norm)},
                       {"m_min_eig", json_real(r.m_min_eig)},
                       {"wall_ms", include_wall_time ? r.wall_ms : 0.0}});
    }
    out << arr.dump(2) << '\n';
}

void write_summary_json(std::ostream& out, const PhaseTable& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : table.cells) {
        arr.push_back({{"d", c.d},
                       {"m", c.m},
                       {"trials", c.trials},
                       {"successes", c.successes},
                       {"rate", c.rate},
                       {"wilson_lo", c.wilson_lo},
                       {"wilson_hi", c.wilson_hi}});
    }
    out << arr.dump(2) << '\n';
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
    expect_header(in, kRecordsHeader);
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 11) {
            throw IoError("records CSV row has " + std::to_string(f.size()) + " fields, expected 11");
        }
        TrialRecord r;
        r.d = parse_integer<std::size_t>(f[0], "d");
        r.m = parse_integer<std::size_t>(f[1], "m");
        r.trial = parse_integer<std::size_t>(f[2], "trial");
        r.seed = parse_integer<std::uint64_t>(f[3], "seed");
        r.success = parse_flag(f[4]);
        r.n_min_eig = parse_real(f[5]);
        r.k_norm = parse_real(f[6]);
        r.max_residual = parse_real(f[7]);
        r.a_norm = parse_real(f[8]);
        r.m_min_eig = parse_real(f[9]);
        r.wall_ms = parse_real(f[10]);
        records.push_back(r);
    }
    return records;
}

PhaseTable read_summary_csv(std::istream& in) {
    expect_header(in, kSummaryHeader);
    PhaseTable table;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 7) {
            throw IoError("summary CSV row has " + std::to_string(f.size()) + " fields, expected 7");
        }
        PhaseCell c;
        c.d = parse_integer<std::size_t>(f[0], "d");
        c.m = parse_integer<std::size_t>(f[1], "m");
        c.trials = parse_integer<std::size_t>(f[2], "trials");
        c.successes = parse_integer<std::size_t>(f[3], "successes");
        c.rate = parse_real(f[4]);
        c.wilson_lo = parse_real(f[5]);
        c.wilson_hi = parse_real(f[6]);
        if (c.trials == 0 || c.successes > c.trials || !(c.rate >= 0.0 && c.rate <= 1.0)) {
            throw IoError("summary CSV row for d=" + std::to_string(c.d) + ", m=" + std::to_string(c.m) +
                          " is inconsistent");
        }
        table.cells.push_back(c);
    }
    return table;
}

void write_sweep_outputs(const std::string& records_path, OutputFormat format, const PhaseSweepResult& result,
                         bool include_wall_time) {
    const std::string summary_path = summary_path_for(records_path);
    std::ofstream records(records_path, std::ios::out | std::ios::trunc | std::ios::binary);
    std::ofstream summary(summary_path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!records) throw IoError("cannot open '" + records_path + "' for writing");
    if (!summary) throw IoError("cannot open '" + summary_path + "' for writing");
    if (format == OutputFormat::csv) {
        write_records_csv(records, result.records, include_wall_time);
        write_summary_csv(summary, result.table);
    } else {
        write_records_json(records, result.records, include_wall_time);
        write_summary_json(summary, result.table);
    }
    if (!records || !summary) {
        throw IoError("write failed for '" + records_path + "'");
    }
}

}  // namespace ellipsoid_lab
