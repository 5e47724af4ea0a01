#include "ellipsoid_lab/experiment.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/gram.hpp"
#include "ellipsoid_lab/io.hpp"
#include "ellipsoid_lab/parallel.hpp"
#include "ellipsoid_lab/sampling.hpp"
#include "ellipsoid_lab/seeding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>
#include <tuple>

namespace ellipsoid_lab {
namespace {

std::size_t m_from_fraction(double fraction, std::size_t d) {
    const double dd = static_cast<double>(d);
    const double m = std::floor(fraction * dd * dd / 4.0);
    return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

void check_writable(const std::string& path) {
    std::ofstream probe(path, std::ios::out | std::ios::trunc);
    if (!probe) {
        throw IoError("cannot open '" + path + "' for writing");
    }
}

}  // namespace

std::vector<PhaseCell> PhaseTable::cells_for(std::size_t d) const {
    std::vector<PhaseCell> out;
    for (const auto& cell : cells) {
        if (cell.d == d) {
            out.push_back(cell);
        }
    }
    return out;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.d_values.empty()) {
        throw UsageError("config: d_values must not be empty");
    }
    for (std::size_t d : cfg.d_values) {
        if (d < 2) {
            throw UsageError("config: every d must be >= 2, got " + std::to_string(d));
        }
    }
    if (cfg.trials < 1) {
        throw UsageError("config: trials must be >= 1");
    }
    if (cfg.m_values.empty() == cfg.m_fractions.empty()) {
        throw UsageError("config: give exactly one of m_values or m_fractions");
    }
    for (std::size_t m : cfg.m_values) {
        if (m < 1) {
            throw UsageError("config: every m must be >= 1");
        }
    }
    for (double f : cfg.m_fractions) {
        if (!(f > 0.0 && f <= 4.0)) {
            throw UsageError("config: m_fractions must lie in (0, 4], got " + std::to_string(f));
        }
    }
    if (!(cfg.fit_options.tolerances.max_residual > 0.0) || !(cfg.fit_options.tolerances.pd_tolerance >= 0.0)) {
        throw UsageError("config: tolerances must be positive");
    }
}

std::vector<std::pair<std::size_t, std::size_t>> grid_cells(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t d : cfg.d_values) {
        if (!cfg.m_values.empty()) {
            for (std::size_t m : cfg.m_values) {
                cells.emplace_back(d, m);
            }
        } else {
            for (double f : cfg.m_fractions) {
                cells.emplace_back(d, m_from_fraction(f, d));
            }
        }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

std::uint64_t derived_seed(std::uint64_t master_seed, std::size_t d, std::size_t m, std::size_t trial) {
    return mix64({master_seed, d, m, trial});
}

TrialRecord run_trial(std::size_t d, std::size_t m, std::uint64_t seed, FitMethod method, const FitOptions& options) {
    if (d < 2 || m < 1) {
        throw UsageError("run_trial: need d >= 2 and m >= 1");
    }
    const auto start = std::chrono::steady_clock::now();
    const SampleSet s = draw_sample_set(d, m, seed);
    const FitResult r = fit(s, method, options);
    const double a_norm = operator_norm(build_A(s));
    const auto stop = std::chrono::steady_clock::now();

    TrialRecord rec;
    rec.d = d;
    rec.m = m;
    rec.seed = seed;
    rec.success = r.success;
    rec.status = r.status;
    rec.n_min_eig = r.N_min_eig;
    rec.k_norm = r.K_norm;
    rec.max_residual = r.max_residual;
    rec.a_norm = a_norm;
    rec.m_min_eig = r.M_min_eig;
    rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return rec;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    if (successes > trials) {
        throw UsageError("wilson_interval: successes exceed trials");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) w.lo = 0.0;
    if (successes == trials) w.hi = 1.0;
    // Guard against rounding pushing the rate outside its own interval.
    w.lo = std::min(w.lo, p);
    w.hi = std::max(w.hi, p);
    return w;
}

PhaseTable aggregate(std::vector<TrialRecord> records) {
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.d, a.m, a.trial) < std::tie(b.d, b.m, b.trial);
    });
    PhaseTable table;
    for (const auto& rec : records) {
        if (table.cells.empty() || table.cells.back().d != rec.d || table.cells.back().m != rec.m) {
            table.cells.push_back(PhaseCell{rec.d, rec.m, 0, 0, 0.0, 0.0, 1.0});
        }
        auto& cell = table.cells.back();
        ++cell.trials;
        if (rec.success) {
            ++cell.successes;
        }
    }
    for (auto& cell : table.cells) {
        cell.rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
        const auto w = wilson_interval(cell.successes, cell.trials);
        cell.wilson_lo = w.lo;
        cell.wilson_hi = w.hi;
    }
    return table;
}

PhaseSweepResult run_phase_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::size_t workers = resolve_worker_count(cfg.workers);
    if (!cfg.output_path.empty()) {
        check_writable(cfg.output_path);
        check_writable(summary_path_for(cfg.output_path));
    }

    struct Job {
        std::size_t d;
        std::size_t m;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (const auto& [d, m] : grid_cells(cfg)) {
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            jobs.push_back({d, m, t});
        }
    }

    PhaseSweepResult result;
    result.records.resize(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const Job& job = jobs[i];
        TrialRecord rec = run_trial(job.d, job.m, derived_seed(cfg.master_seed, job.d, job.m, job.trial), cfg.method,
                                    cfg.fit_options);
        rec.trial = job.trial;
        result.records[i] = rec;
    });
    result.table = aggregate(result.records);

    if (!cfg.output_path.empty()) {
        write_sweep_outputs(cfg.output_path, cfg.format, result, cfg.record_wall_time);
    }
    return result;
}

std::optional<double> estimate_transition(const PhaseTable& table, std::size_t d) {
    const auto cells = table.cells_for(d);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double r0 = cells[k].rate - 0.5;
        if (r0 == 0.0) {
            return static_cast<double>(cells[k].m);
        }
        if (k + 1 < cells.size()) {
            const double r1 = cells[k + 1].rate - 0.5;
            if (r0 * r1 < 0.0) {
                const double m0 = static_cast<double>(cells[k].m);
                const double m1 = static_cast<double>(cells[k + 1].m);
                return m0 + (0.0 - r0) / (r1 - r0) * (m1 - m0);
            }
        }
    }
    return std::nullopt;
}

bool rates_non_increasing_within_intervals(const PhaseTable& table, std::size_t d) {
    const auto cells = table.cells_for(d);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const bool decreasing = cells[j].rate <= cells[i].rate;
            const bool overlap = cells[j].wilson_lo <= cells[i].wilson_hi && cells[i].wilson_lo <= cells[j].wilson_hi;
            if (!decreasing && !overlap) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace ellipsoid_lab
