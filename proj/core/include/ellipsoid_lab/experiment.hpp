#pragma once

#include "ellipsoid_lab/construct.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ellipsoid_lab {

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    std::vector<std::size_t> d_values;
    /// Exactly one of m_values / m_fractions must be non-empty. A fraction f
    /// maps to m = max(1, floor(f * d^2 / 4)).
    std::vector<std::size_t> m_values;
    std::vector<double> m_fractions;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    FitMethod method = FitMethod::identity_perturbation;
    FitOptions fit_options;
    std::size_t n_u = 100;
    /// Records file; the summary goes to summary_path_for(output_path).
    /// Empty means keep results in memory only.
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    std::size_t workers = 0;  ///< 0 = auto; ELLIPSOID_LAB_THREADS overrides
    /// When false the wall_ms column is written as 0 so output files are
    /// byte-reproducible.
    bool record_wall_time = false;
};

struct TrialRecord {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    bool success = false;
    FitStatus status = FitStatus::singular_system;
    double n_min_eig = 0.0;
    double k_norm = 0.0;
    double max_residual = 0.0;
    double a_norm = 0.0;
    double m_min_eig = 0.0;
    double wall_ms = 0.0;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

struct PhaseCell {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double rate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;

    bool operator==(const PhaseCell&) const = default;
};

/// Cells sorted by (d, m).
struct PhaseTable {
    std::vector<PhaseCell> cells;

    bool operator==(const PhaseTable&) const = default;
    std::vector<PhaseCell> cells_for(std::size_t d) const;
};

struct PhaseSweepResult {
    std::vector<TrialRecord> records;  ///< sorted by (d, m, trial)
    PhaseTable table;
};

/// Throws UsageError describing the first violated constraint.
void validate(const ExperimentConfig& cfg);

/// Distinct (d, m) pairs of the grid in (d, m) order.
std::vector<std::pair<std::size_t, std::size_t>> grid_cells(const ExperimentConfig& cfg);

/// mix64({master_seed, d, m, trial}).
std::uint64_t derived_seed(std::uint64_t master_seed, std::size_t d, std::size_t m, std::size_t trial);

/// Draws a SampleSet from `seed`, fits it and records certificates. The
/// returned record has trial = 0; the sweep fills in the index.
TrialRecord run_trial(std::size_t d, std::size_t m, std::uint64_t seed, FitMethod method,
                      const FitOptions& options = {});

/// Wilson score interval at confidence given by z (default 95%).
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Deterministic fold of records (any order) into a PhaseTable.
PhaseTable aggregate(std::vector<TrialRecord> records);

/// Validates the config, checks the output files are writable, runs every
/// trial on the resolved worker count and writes records and summary when
/// output_path is set. Output is independent of the worker count.
PhaseSweepResult run_phase_sweep(const ExperimentConfig& cfg);

/// m where the success rate for dimension d crosses 0.5, by linear
/// interpolation between neighbouring cells; the first crossing in m wins
/// and a cell with rate exactly 0.5 is returned as is. nullopt when the
/// rates never cross 0.5.
std::optional<double> estimate_transition(const PhaseTable& table, std::size_t d);

/// True when for every pair of cells m_i < m_j of dimension d either
/// rate_j <= rate_i or the two Wilson intervals overlap.
bool rates_non_increasing_within_intervals(const PhaseTable& table, std::size_t d);

}  // namespace ellipsoid_lab
