#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/experiment.hpp"
#include "ellipsoid_lab/parallel.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

using namespace ellipsoid_lab;

namespace {

PhaseTable table_from(std::size_t d, std::vector<std::pair<std::size_t, double>> rates) {
    PhaseTable t;
    for (auto [m, r] : rates) {
        PhaseCell c;
        c.d = d;
        c.m = m;
        c.trials = 10;
        c.successes = static_cast<std::size_t>(std::lround(r * 10));
        c.rate = r;
        t.cells.push_back(c);
    }
    return t;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.d_values = {6, 10};
    cfg.m_fractions = {0.5, 1.0, 2.0};
    cfg.trials = 6;
    cfg.master_seed = 3;
    return cfg;
}

}  // namespace

TEST(RunTrial, SinglePointAlwaysFits) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_TRUE(run_trial(3, 1, seed, FitMethod::identity_perturbation).success);
}

TEST(RunTrial, Deterministic) {
    const TrialRecord a = run_trial(12, 20, 5, FitMethod::identity_perturbation);
    const TrialRecord b = run_trial(12, 20, 5, FitMethod::identity_perturbation);
    EXPECT_EQ(a.n_min_eig, b.n_min_eig);
    EXPECT_EQ(a.k_norm, b.k_norm);
    EXPECT_EQ(a.a_norm, b.a_norm);
    EXPECT_EQ(a.success, b.success);
}

TEST(RunTrial, DeepInfeasibleRegimeFails) {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) failures += !run_trial(50, 2000, seed, FitMethod::identity_perturbation).success;
    EXPECT_EQ(failures, 3);
}

TEST(RunTrial, RejectsBadArguments) {
    EXPECT_THROW(run_trial(1, 3, 0, FitMethod::identity_perturbation), UsageError);
    EXPECT_THROW(run_trial(3, 0, 0, FitMethod::identity_perturbation), UsageError);
}

TEST(Wilson, EdgeCasesAndContainment) {
    EXPECT_EQ(wilson_interval(0, 20).lo, 0.0);
    EXPECT_EQ(wilson_interval(20, 20).hi, 1.0);
    for (std::size_t n : {1, 7, 100}) {
        for (std::size_t k = 0; k <= n; ++k) {
            const WilsonInterval w = wilson_interval(k, n);
            const double rate = double(k) / n;
            EXPECT_LE(w.lo, rate);
            EXPECT_GE(w.hi, rate);
            EXPECT_GE(w.lo, 0.0);
            EXPECT_LE(w.hi, 1.0);
        }
    }
}

TEST(Wilson, MatchesClosedForm) {
    const double z = 1.959963984540054, n = 40, p = 13 / 40.0;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    const WilsonInterval w = wilson_interval(13, 40);
    EXPECT_NEAR(w.lo, centre - half, 1e-14);
    EXPECT_NEAR(w.hi, centre + half, 1e-14);
}

TEST(EstimateTransition, Examples) {
    EXPECT_NEAR(*estimate_transition(table_from(20, {{100, 1.0}, {200, 0.5}, {300, 0.0}}), 20), 200.0, 1e-12);
    EXPECT_NEAR(*estimate_transition(table_from(20, {{100, 0.9}, {300, 0.1}}), 20), 200.0, 1e-12);
    EXPECT_FALSE(estimate_transition(table_from(20, {{100, 0.9}, {300, 0.8}}), 20).has_value());
    EXPECT_FALSE(estimate_transition(table_from(20, {{100, 0.9}, {300, 0.1}}), 30).has_value());
    // First crossing by increasing m wins.
    EXPECT_NEAR(*estimate_transition(table_from(20, {{100, 1.0}, {200, 0.0}, {300, 1.0}, {400, 0.0}}), 20), 150.0,
                1e-12);
}

TEST(Config, Validation) {
    ExperimentConfig cfg = small_config();
    EXPECT_NO_THROW(validate(cfg));
    cfg.trials = 0;
    EXPECT_THROW(validate(cfg), UsageError);
    cfg = small_config();
    cfg.d_values = {1};
    EXPECT_THROW(validate(cfg), UsageError);
    cfg = small_config();
    cfg.m_fractions = {4.5};
    EXPECT_THROW(validate(cfg), UsageError);
    cfg = small_config();
    cfg.m_values = {5};
    EXPECT_THROW(validate(cfg), UsageError);  // both forms given
}

TEST(Config, FractionGrid) {
    const auto cells = grid_cells(small_config());
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_EQ(cells[0], std::make_pair(std::size_t{6}, std::size_t{4}));
    EXPECT_EQ(cells[2], std::make_pair(std::size_t{6}, std::size_t{18}));
    EXPECT_EQ(cells[3], std::make_pair(std::size_t{10}, std::size_t{12}));
}

TEST(PhaseSweep, OneCellOneTrial) {
    ExperimentConfig cfg;
    cfg.d_values = {5};
    cfg.m_values = {3};
    const PhaseSweepResult r = run_phase_sweep(cfg);
    ASSERT_EQ(r.records.size(), 1u);
    ASSERT_EQ(r.table.cells.size(), 1u);
    EXPECT_EQ(r.table.cells[0].trials, 1u);
    EXPECT_EQ(r.records[0].seed, derived_seed(0, 5, 3, 0));
}

TEST(PhaseSweep, SortedAndIndependentOfWorkers) {
    ExperimentConfig cfg = small_config();
    cfg.workers = 1;
    const PhaseSweepResult a = run_phase_sweep(cfg);
    cfg.workers = 4;
    const PhaseSweepResult b = run_phase_sweep(cfg);
    ASSERT_EQ(a.records.size(), 36u);
    EXPECT_EQ(a.table, b.table);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        EXPECT_EQ(a.records[k].seed, b.records[k].seed);
        EXPECT_EQ(a.records[k].n_min_eig, b.records[k].n_min_eig);
        if (k > 0) {
            const auto& p = a.records[k - 1];
            const auto& q = a.records[k];
            EXPECT_TRUE(std::tie(p.d, p.m, p.trial) < std::tie(q.d, q.m, q.trial));
        }
        EXPECT_EQ(a.records[k].seed, derived_seed(3, a.records[k].d, a.records[k].m, a.records[k].trial));
    }
}

TEST(PhaseSweep, AggregateMatchesRecords) {
    const PhaseSweepResult r = run_phase_sweep(small_config());
    for (const PhaseCell& c : r.table.cells) {
        std::size_t n = 0, k = 0;
        for (const TrialRecord& t : r.records) {
            if (t.d == c.d && t.m == c.m) {
                ++n;
                k += t.success;
            }
        }
        EXPECT_EQ(c.trials, n);
        EXPECT_EQ(c.successes, k);
        EXPECT_DOUBLE_EQ(c.rate, double(k) / n);
        EXPECT_LE(c.wilson_lo, c.rate);
        EXPECT_GE(c.wilson_hi, c.rate);
    }
}

TEST(PhaseSweep, UnwritableOutputFailsBeforeCompute) {
    ExperimentConfig cfg = small_config();
    cfg.trials = 100000;  // would take far too long if computed
    cfg.output_path = "/nonexistent-dir/runs.csv";
    EXPECT_THROW(run_phase_sweep(cfg), IoError);
}

TEST(PhaseSweep, RatesDecreaseAcrossTransition) {
    ExperimentConfig cfg;
    cfg.d_values = {20};
    cfg.m_fractions = {0.1, 0.5, 1.0, 2.0};
    cfg.trials = 30;
    cfg.master_seed = 1;
    const PhaseSweepResult r = run_phase_sweep(cfg);
    EXPECT_TRUE(rates_non_increasing_within_intervals(r.table, 20));
    EXPECT_GE(r.table.cells.front().rate, 0.9);
    EXPECT_LE(r.table.cells.back().rate, 0.1);
}

TEST(Parallel, WorkerCountResolution) {
    unsetenv(kThreadsEnvVar);
    EXPECT_EQ(resolve_worker_count(3), 3u);
    EXPECT_GE(resolve_worker_count(0), 1u);
    setenv(kThreadsEnvVar, "2", 1);
    EXPECT_EQ(resolve_worker_count(7), 2u);
    unsetenv(kThreadsEnvVar);
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrows) {
    std::vector<std::atomic<int>> hits(200);
    parallel_for(200, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(50, 3, [](std::size_t i) {
                     if (i == 17) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}
