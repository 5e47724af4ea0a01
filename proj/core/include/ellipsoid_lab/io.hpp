#pragma once

#include "ellipsoid_lab/experiment.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ellipsoid_lab {

/// Records CSV header, in column order.
inline constexpr std::string_view kRecordsHeader =
    "d,m,trial,seed,success,n_min_eig,k_norm,max_residual,a_norm,m_min_eig,wall_ms";
/// Summary CSV header, in column order.
inline constexpr std::string_view kSummaryHeader = "d,m,trials,successes,rate,wilson_lo,wilson_hi";

/// Shortest-safe decimal form: '.' separator, 17 significant digits,
/// no locale. NaN and infinities print as nan, inf, -inf.
std::string format_real(double value);

/// Parses a value written by format_real. Throws IoError on junk.
double parse_real(std::string_view text);

/// "runs.csv" -> "runs.summary.csv"; "out" -> "out.summary".
std::string summary_path_for(const std::string& records_path);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records, bool include_wall_time);
void write_summary_csv(std::ostream& out, const PhaseTable& table);
void write_records_json(std::ostream& out, const std::vector<TrialRecord>& records, bool include_wall_time);
void write_summary_json(std::ostream& out, const PhaseTable& table);

/// Throws IoError on a wrong header, wrong column count or bad field.
std::vector<TrialRecord> read_records_csv(std::istream& in);
PhaseTable read_summary_csv(std::istream& in);

/// Writes records to `records_path` and the summary next to it.
void write_sweep_outputs(const std::string& records_path, OutputFormat format, const PhaseSweepResult& result,
                         bool include_wall_time);

}  // namespace ellipsoid_lab
