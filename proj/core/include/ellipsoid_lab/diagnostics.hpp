#pragma once

#include "ellipsoid_lab/construct.hpp"
#include "ellipsoid_lab/sampling.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ellipsoid_lab {

/// Event thresholds, all with natural logarithms:
///   E1: ||A||_2 < 1/2
///   E2: max_i |eps_i| < 2 log(d) / sqrt(d)
///   E3: max_i |delta_i| < log(d)^2 / sqrt(d)
double e2_threshold(std::size_t d);
double e3_threshold(std::size_t d);
/// Probe coordinates with beta_i > d^{-1/4} are heavy.
double heavy_threshold(std::size_t d);

struct BetaProbe {
    std::size_t heavy_count = 0;
    double light_norm_sq = 0.0;
    double quad_form = 0.0;  ///< |delta . beta|
    /// ||M^{-1} beta_light||_2^2, only when requested.
    std::optional<double> gamma_norm_sq;
    bool eigenvector_probe = false;  ///< true for the top eigenvector of K
};

struct DiagReport {
    double a_norm = 0.0;
    bool e1_pass = false;
    double eps_max = 0.0;
    bool e2_pass = false;
    double delta_max = 0.0;
    bool e3_pass = false;
    /// ||M^{-1} 1 - (d/m) 1||_2, NaN when M is singular.
    double m_inv_one_dev = 0.0;
    double m_inv_one_ratio = 0.0;  ///< m_inv_one_dev / (d / sqrt(m))
    std::vector<BetaProbe> beta_stats;
};

struct MInvOneCheck {
    double deviation = 0.0;
    double ratio = 0.0;
    bool ok = false;  ///< false when M is numerically singular
};

struct BetaSplit {
    std::vector<std::size_t> heavy_indices;  ///< increasing
    Eigen::VectorXd light;                   ///< remaining beta entries, original order
    double light_norm_sq = 0.0;
    Eigen::VectorXd beta;                    ///< full beta_i = (u . v_i)^2
};

struct QuadFormCheck {
    double delta_dot_beta = 0.0;  ///< |sum_i delta_i (u . v_i)^2|
    double direct = 0.0;          ///< |u^T K u| with K = N - I formed explicitly
};

struct NormCertificates {
    double a_norm = 0.0;
    double a_prime_norm = 0.0;
    double a_star_norm = 0.0;
    bool triangle_ok = false;  ///< a_norm <= a_prime_norm + a_star_norm + 1e-9
};

/// E1/E2/E3 and the M^{-1} 1 deviation; beta_stats left empty. Never throws
/// on a singular system: the affected fields become NaN and fail.
DiagReport check_events(const SampleSet& s, const FitResult& fit);

MInvOneCheck m_inv_one_check(const SampleSet& s);

/// Throws UsageError unless ||u|| = 1 +- 1e-10 and u.size() == d.
BetaSplit beta_split(const SampleSet& s, const Eigen::VectorXd& u);

/// Requires fit.delta.size() == m (UsageError otherwise).
QuadFormCheck quad_form_check(const SampleSet& s, const FitResult& fit, const Eigen::VectorXd& u);

NormCertificates norm_certificates(const SampleSet& s);

struct ProbeOptions {
    std::size_t n_u = 100;
    std::uint64_t seed = 0;
    bool include_eigenvector = true;
    bool with_gamma = false;
};

/// n_u random unit probes (seeded by mix64({seed, probe})) followed, if
/// requested, by the top eigenvector of K. Results ordered by probe index.
std::vector<BetaProbe> run_beta_probes(const SampleSet& s, const FitResult& fit, const ProbeOptions& options);

/// Everything the diagnose command reports for one sample set.
struct SeedDiagnostics {
    std::uint64_t seed = 0;
    DiagReport events;  ///< beta_stats filled with the probe results
    NormCertificates norms;
    bool fit_success = false;
    double k_norm = 0.0;
    /// max |delta . beta| over the random probes only.
    double max_random_quad_form = 0.0;
    std::size_t max_heavy_count = 0;
    double max_light_norm_sq = 0.0;
    /// |delta . beta| for the top eigenvector of K (equals ||K||_2).
    std::optional<double> eigenvector_quad_form;
};

/// Draws draw_sample_set(d, m, seed), fits it with the identity
/// construction and runs check_events, norm_certificates and the probes.
SeedDiagnostics diagnose_sample(std::size_t d, std::size_t m, std::uint64_t seed, const ProbeOptions& probes);

}  // namespace ellipsoid_lab
