#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/experiment.hpp"
#include "ellipsoid_lab/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace ellipsoid_lab;

TEST(FormatReal, RoundTripsExactly) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int rep = 0; rep < 2000; ++rep) {
        const double x = u(rng) * std::pow(10.0, rep % 40 - 20);
        EXPECT_EQ(parse_real(format_real(x)), x);
    }
    for (double x : {0.0, 1.0, -0.25, 5e-324, std::numeric_limits<double>::max()}) {
        EXPECT_EQ(parse_real(format_real(x)), x);
    }
}

TEST(FormatReal, PlainDecimalAndSpecials) {
    EXPECT_EQ(format_real(0.5), "0.5");
    EXPECT_EQ(format_real(1234567.0), "1234567");
    EXPECT_EQ(format_real(std::nan("")), "nan");
    EXPECT_EQ(format_real(-INFINITY), "-inf");
    EXPECT_TRUE(std::isnan(parse_real("nan")));
    EXPECT_THROW(parse_real("1,5"), IoError);
    EXPECT_THROW(parse_real(""), IoError);
}

TEST(SummaryPath, SitsNextToRecords) {
    EXPECT_EQ(summary_path_for("out/runs.csv"), "out/runs.summary.csv");
    EXPECT_EQ(summary_path_for("runs.json"), "runs.summary.json");
    EXPECT_EQ(summary_path_for("runs"), "runs.summary");
}

TEST(RecordsCsv, HeaderAndRoundTrip) {
    ExperimentConfig cfg;
    cfg.d_values = {5, 8};
    cfg.m_values = {2, 9};
    cfg.trials = 3;
    const PhaseSweepResult r = run_phase_sweep(cfg);
    std::stringstream ss;
    write_records_csv(ss, r.records, false);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    EXPECT_EQ(header, "d,m,trial,seed,success,n_min_eig,k_norm,max_residual,a_norm,m_min_eig,wall_ms");
    const std::vector<TrialRecord> back = read_records_csv(ss);
    ASSERT_EQ(back.size(), r.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        EXPECT_EQ(back[k].seed, r.records[k].seed);
        EXPECT_EQ(back[k].success, r.records[k].success);
        EXPECT_EQ(back[k].n_min_eig, r.records[k].n_min_eig);
        EXPECT_EQ(back[k].max_residual, r.records[k].max_residual);
        EXPECT_EQ(back[k].wall_ms, 0.0);
    }
}

TEST(SummaryCsv, RoundTripEqualsInMemoryTable) {
    ExperimentConfig cfg;
    cfg.d_values = {6};
    cfg.m_fractions = {0.5, 1.0, 2.0};
    cfg.trials = 7;
    const PhaseSweepResult r = run_phase_sweep(cfg);
    std::stringstream ss;
    write_summary_csv(ss, r.table);
    EXPECT_EQ(read_summary_csv(ss), r.table);
}

TEST(SummaryCsv, MalformedInputs) {
    std::stringstream empty;
    EXPECT_THROW(read_summary_csv(empty), IoError);
    std::stringstream bad_header("d,m,rate\n");
    EXPECT_THROW(read_summary_csv(bad_header), IoError);
    std::stringstream short_row(std::string(kSummaryHeader) + "\n10,5,3\n");
    EXPECT_THROW(read_summary_csv(short_row), IoError);
    std::stringstream bad_value(std::string(kSummaryHeader) + "\n10,5,3,x,1,0,1\n");
    EXPECT_THROW(read_summary_csv(bad_value), IoError);
}

TEST(Json, RecordsAndSummaryParse) {
    TrialRecord t;
    t.d = 4;
    t.m = 2;
    t.n_min_eig = std::nan("");
    t.k_norm = 0.125;
    std::stringstream rec;
    write_records_json(rec, {t}, false);
    const auto j = nlohmann::json::parse(rec.str());
    ASSERT_EQ(j.size(), 1u);
    EXPECT_TRUE(j[0]["n_min_eig"].is_null());
    EXPECT_EQ(j[0]["k_norm"].get<double>(), 0.125);

    PhaseTable table;
    table.cells.push_back({4, 2, 10, 9, 0.9, 0.6, 0.98});
    std::stringstream sum;
    write_summary_json(sum, table);
    const auto s = nlohmann::json::parse(sum.str());
    EXPECT_EQ(s[0]["successes"].get<int>(), 9);
}
