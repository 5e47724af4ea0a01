#include "ellipsoid_lab/diagnostics.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/gram.hpp"
#include "ellipsoid_lab/numerics.hpp"
#include "ellipsoid_lab/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ellipsoid_lab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_probe(const SampleSet& s, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) != s.d()) {
        throw UsageError("probe vector length " + std::to_string(u.size()) + " does not match d = " +
                         std::to_string(s.d()));
    }
    if (std::abs(u.norm() - 1.0) > 1e-10) {
        throw UsageError("probe vector must be a unit vector");
    }
}

void require_delta(const SampleSet& s, const FitResult& fit) {
    if (fit.method != FitMethod::identity_perturbation) {
        throw UsageError("diagnostics need an identity_perturbation fit");
    }
    if (static_cast<std::size_t>(fit.delta.size()) != s.m()) {
        throw UsageError("fit does not belong to this sample set (delta length mismatch)");
    }
}

double max_abs(const Eigen::VectorXd& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

}  // namespace

double e2_threshold(std::size_t d) {
    const double dd = static_cast<double>(d);
    return 2.0 * std::log(dd) / std::sqrt(dd);
}

double e3_threshold(std::size_t d) {
    const double dd = static_cast<double>(d);
    const double l = std::log(dd);
    return l * l / std::sqrt(dd);
}

double heavy_threshold(std::size_t d) {
    return std::pow(static_cast<double>(d), -0.25);
}

MInvOneCheck m_inv_one_check(const SampleSet& s) {
    const auto m = static_cast<Eigen::Index>(s.m());
    const double dm = static_cast<double>(s.d()) / static_cast<double>(s.m());
    const SolveReport solve = sym_solve(build_M(s), Eigen::VectorXd::Ones(m));
    MInvOneCheck out;
    out.ok = solve.ok;
    if (!solve.ok) {
        out.deviation = kNaN;
        out.ratio = kNaN;
        return out;
    }
    out.deviation = (solve.solution.array() - dm).matrix().norm();
    out.ratio = out.deviation / (static_cast<double>(s.d()) / std::sqrt(static_cast<double>(s.m())));
    return out;
}

DiagReport check_events(const SampleSet& s, const FitResult& fit) {
    require_delta(s, fit);
    DiagReport r;
    r.a_norm = operator_norm(build_A(s));
    r.e1_pass = r.a_norm < 0.5;
    r.eps_max = max_abs(s.eps());
    r.e2_pass = r.eps_max < e2_threshold(s.d());
    if (fit.delta.allFinite()) {
        r.delta_max = max_abs(fit.delta);
        r.e3_pass = r.delta_max < e3_threshold(s.d());
    } else {
        r.delta_max = kNaN;
        r.e3_pass = false;
    }
    const auto check = m_inv_one_check(s);
    r.m_inv_one_dev = check.deviation;
    r.m_inv_one_ratio = check.ratio;
    return r;
}

BetaSplit beta_split(const SampleSet& s, const Eigen::VectorXd& u) {
    require_probe(s, u);
    BetaSplit out;
    out.beta = (s.directions().transpose() * u).cwiseAbs2();
    const double threshold = heavy_threshold(s.d());
    std::vector<double> light;
    light.reserve(s.m());
    for (Eigen::Index i = 0; i < out.beta.size(); ++i) {
        if (out.beta(i) > threshold) {
            out.heavy_indices.push_back(static_cast<std::size_t>(i));
        } else {
            light.push_back(out.beta(i));
        }
    }
    out.light = Eigen::Map<Eigen::VectorXd>(light.data(), static_cast<Eigen::Index>(light.size()));
    out.light_norm_sq = out.light.squaredNorm();
    return out;
}

QuadFormCheck quad_form_check(const SampleSet& s, const FitResult& fit, const Eigen::VectorXd& u) {
    require_probe(s, u);
    require_delta(s, fit);
    const Eigen::VectorXd beta = (s.directions().transpose() * u).cwiseAbs2();
    QuadFormCheck out;
    out.delta_dot_beta = std::abs(fit.delta.dot(beta));
    const SymMatrix k = fit.ellipsoid ? fit.ellipsoid->shifted(-1.0) : assemble_N(s, fit.delta).shifted(-1.0);
    out.direct = std::abs(u.dot(k.dense() * u));
    return out;
}

NormCertificates norm_certificates(const SampleSet& s) {
    const GramSystem g = build_gram_system(s);
    NormCertificates out;
    out.a_norm = operator_norm(g.A);
    out.a_prime_norm = operator_norm(g.A_prime);
    out.a_star_norm = operator_norm(g.A_star);
    out.triangle_ok = out.a_norm <= out.a_prime_norm + out.a_star_norm + 1e-9;
    return out;
}

std::vector<BetaProbe> run_beta_probes(const SampleSet& s, const FitResult& fit, const ProbeOptions& options) {
    require_delta(s, fit);
    std::vector<Eigen::VectorXd> probes;
    probes.reserve(options.n_u + 1);
    for (std::size_t p = 0; p < options.n_u; ++p) {
        Rng rng(mix64({options.seed, p}));
        probes.push_back(random_unit_vector(s.d(), rng));
    }
    if (options.include_eigenvector && fit.delta.allFinite()) {
        probes.push_back(low_rank_dominant_eigenvector(s.directions(), fit.delta));
    }

    std::optional<SymFactorization> factor;
    if (options.with_gamma) {
        factor.emplace(build_M(s));
    }

    std::vector<BetaProbe> out;
    out.reserve(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const BetaSplit split = beta_split(s, probes[p]);
        BetaProbe probe;
        probe.heavy_count = split.heavy_indices.size();
        probe.light_norm_sq = split.light_norm_sq;
        probe.quad_form = std::abs(fit.delta.dot(split.beta));
        probe.eigenvector_probe = p >= options.n_u;
        if (factor) {
            // beta_light as an m-vector with heavy coordinates zeroed.
            Eigen::VectorXd light_full = split.beta;
            for (std::size_t i : split.heavy_indices) {
                light_full(static_cast<Eigen::Index>(i)) = 0.0;
            }
            const SolveReport gamma = factor->solve(light_full);
            probe.gamma_norm_sq = gamma.ok ? gamma.solution.squaredNorm() : kNaN;
        }
        out.push_back(probe);
    }
    return out;
}

SeedDiagnostics diagnose_sample(std::size_t d, std::size_t m, std::uint64_t seed, const ProbeOptions& probes) {
    const SampleSet s = draw_sample_set(d, m, seed);
    const FitResult f = identity_perturbation_fit(s);

    SeedDiagnostics out;
    out.seed = seed;
    out.events = check_events(s, f);
    out.norms = norm_certificates(s);
    out.fit_success = f.success;
    out.k_norm = f.K_norm;
    if (!f.delta.allFinite()) {
        out.max_random_quad_form = kNaN;
        out.max_light_norm_sq = kNaN;
        return out;
    }
    out.events.beta_stats = run_beta_probes(s, f, probes);
    for (const auto& probe : out.events.beta_stats) {
        if (probe.eigenvector_probe) {
            out.eigenvector_quad_form = probe.quad_form;
            continue;
        }
        out.max_random_quad_form = std::max(out.max_random_quad_form, probe.quad_form);
        out.max_heavy_count = std::max(out.max_heavy_count, probe.heavy_count);
        out.max_light_norm_sq = std::max(out.max_light_norm_sq, probe.light_norm_sq);
    }
    return out;
}

}  // namespace ellipsoid_lab
