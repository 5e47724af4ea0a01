#include "ellipsoid_lab/construct.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/gram.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ellipsoid_lab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// max_i |x_i^T (shift I + U diag(w) U^T) x_i - 1| without forming the d x d matrix.
double low_rank_residual(const Eigen::MatrixXd& points, const Eigen::MatrixXd& u, const Eigen::VectorXd& w,
                         double shift) {
    const Eigen::MatrixXd proj = u.transpose() * points;  // k x m
    const Eigen::VectorXd quad =
        shift * points.colwise().squaredNorm().transpose() + proj.cwiseAbs2().transpose() * w;
    return (quad.array() - 1.0).abs().maxCoeff();
}

struct Certificates {
    double n_min = kNaN;
    double n_max = kNaN;
    double k_norm = kNaN;
    double residual = kNaN;
    std::optional<SymMatrix> dense;
};

// Certificates for N = shift * I + U diag(w) U^T.
Certificates certify(const SampleSet& s, const Eigen::MatrixXd& u, const Eigen::VectorXd& w, double shift,
                     const FitOptions& options) {
    Certificates c;
    if (!w.allFinite()) {
        return c;
    }
    if (s.d() <= options.max_dense_dimension) {
        Eigen::MatrixXd n = u * w.asDiagonal() * u.transpose();
        n.diagonal().array() += shift;
        SymMatrix sym = SymMatrix::symmetrized(n);
        const auto range = extreme_eigs(sym);
        c.n_min = range.min;
        c.n_max = range.max;
        c.k_norm = std::max(std::abs(range.min - 1.0), std::abs(range.max - 1.0));
        c.residual = verify_fit(sym, s);
        c.dense = std::move(sym);
    } else {
        const auto range = low_rank_extreme_eigs(u, w, shift);
        c.n_min = range.min;
        c.n_max = range.max;
        c.k_norm = std::max(std::abs(range.min - 1.0), std::abs(range.max - 1.0));
        c.residual = low_rank_residual(s.points(), u, w, shift);
    }
    return c;
}

void finalize(FitResult& r, const Certificates& c, double pd_floor, const FitTolerances& tol) {
    r.N_min_eig = c.n_min;
    r.N_max_eig = c.n_max;
    r.K_norm = c.k_norm;
    r.max_residual = c.residual;
    r.ellipsoid = c.dense;
    if (!r.solve_ok) {
        r.status = FitStatus::singular_system;
    } else if (!(r.max_residual <= tol.max_residual)) {
        r.status = FitStatus::residual_too_large;
    } else if (!(r.N_min_eig > pd_floor)) {
        r.status = FitStatus::not_positive_definite;
    } else {
        r.status = FitStatus::ok;
    }
    r.success = r.status == FitStatus::ok;
}

}  // namespace

std::string_view to_string(FitMethod method) {
    switch (method) {
        case FitMethod::identity_perturbation: return "identity_perturbation";
        case FitMethod::least_norm: return "least_norm";
    }
    return "unknown";
}

std::string_view to_string(FitStatus status) {
    switch (status) {
        case FitStatus::ok: return "ok";
        case FitStatus::singular_system: return "singular_system";
        case FitStatus::residual_too_large: return "residual_too_large";
        case FitStatus::not_positive_definite: return "not_positive_definite";
    }
    return "unknown";
}

std::optional<FitMethod> parse_fit_method(std::string_view text) {
    if (text == "identity_perturbation") return FitMethod::identity_perturbation;
    if (text == "least_norm") return FitMethod::least_norm;
    return std::nullopt;
}

SymMatrix assemble_N(const SampleSet& s, const Eigen::VectorXd& delta) {
    if (static_cast<std::size_t>(delta.size()) != s.m()) {
        throw UsageError("assemble_N: delta has length " + std::to_string(delta.size()) + ", expected " +
                         std::to_string(s.m()));
    }
    const auto& v = s.directions();
    Eigen::MatrixXd n = v * delta.asDiagonal() * v.transpose();
    n.diagonal().array() += 1.0;
    return SymMatrix::symmetrized(n);
}

double verify_fit(const SymMatrix& n, const SampleSet& s) {
    if (n.order() != s.d()) {
        throw UsageError("verify_fit: matrix order " + std::to_string(n.order()) + " does not match d = " +
                         std::to_string(s.d()));
    }
    const Eigen::MatrixXd x = s.points();
    const Eigen::VectorXd quad = (x.transpose() * n.dense()).cwiseProduct(x.transpose()).rowwise().sum();
    return (quad.array() - 1.0).abs().maxCoeff();
}

FitResult identity_perturbation_fit(const SampleSet& s, const FitOptions& options) {
    FitResult r;
    r.method = FitMethod::identity_perturbation;

    const SymMatrix M = build_M(s);
    const SolveReport solve = sym_solve(M, s.eps());
    r.delta = solve.solution;
    r.condition_estimate = solve.condition_estimate;
    r.solve_ok = solve.ok;
    r.singular = !solve.ok;
    r.M_min_eig = extreme_eigs(M).min;

    const Certificates c = certify(s, s.directions(), r.delta, 1.0, options);
    finalize(r, c, options.tolerances.pd_tolerance, options.tolerances);
    return r;
}

FitResult least_norm_fit(const SampleSet& s, const FitOptions& options) {
    FitResult r;
    r.method = FitMethod::least_norm;

    const Eigen::MatrixXd x = s.points();
    const Eigen::MatrixXd gram = x.transpose() * x;
    const SymMatrix G = SymMatrix::symmetrized(gram.cwiseAbs2());

    Eigen::VectorXd rhs;
    double shift = 0.0;
    if (options.least_norm_objective == LeastNormObjective::frobenius) {
        rhs = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.m()));
    } else {
        rhs = 1.0 - x.colwise().squaredNorm().transpose().array();
        shift = 1.0;
    }

    const SolveReport solve = sym_solve(G, rhs);
    r.delta = solve.solution;
    r.condition_estimate = solve.condition_estimate;
    r.solve_ok = solve.ok;
    r.singular = !solve.ok;
    r.M_min_eig = extreme_eigs(G).min;

    const Certificates c = certify(s, x, r.delta, shift, options);
    finalize(r, c, -options.tolerances.pd_tolerance, options.tolerances);
    return r;
}

FitResult fit(const SampleSet& s, FitMethod method, const FitOptions& options) {
    switch (method) {
        case FitMethod::identity_perturbation: return identity_perturbation_fit(s, options);
        case FitMethod::least_norm: return least_norm_fit(s, options);
    }
    throw UsageError("fit: unknown method");
}

}  // namespace ellipsoid_lab
