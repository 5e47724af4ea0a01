#pragma once

#include "ellipsoid_lab/numerics.hpp"
#include "ellipsoid_lab/sampling.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>

namespace ellipsoid_lab {

enum class FitMethod { identity_perturbation, least_norm };

/// Which matrix the least-norm baseline minimizes.
enum class LeastNormObjective {
    frobenius,           ///< min ||N||_F:      G c = 1,  N = sum c_i x_i x_i^T
    frobenius_from_identity  ///< min ||N - I||_F: G c = 1 - ||x_i||^2, N = I + sum c_i x_i x_i^T
};

/// Why a fit did not succeed.
enum class FitStatus { ok, singular_system, residual_too_large, not_positive_definite };

std::string_view to_string(FitMethod method);
std::string_view to_string(FitStatus status);
std::optional<FitMethod> parse_fit_method(std::string_view text);

struct FitTolerances {
    double max_residual = 1e-8;
    /// identity_perturbation needs lambda_min(N) > pd_tolerance; least_norm
    /// needs lambda_min(N) > -pd_tolerance.
    double pd_tolerance = 1e-9;
};

struct FitOptions {
    FitTolerances tolerances;
    LeastNormObjective least_norm_objective = LeastNormObjective::frobenius;
    /// N is formed as a dense d x d matrix only up to this dimension; above
    /// it, certificates come from the low-rank representation.
    std::size_t max_dense_dimension = 4000;
};

struct FitResult {
    FitMethod method = FitMethod::identity_perturbation;
    /// identity_perturbation: delta = M^{-1} eps, N = I + sum delta_i v_i v_i^T.
    /// least_norm: the coefficients c of N in the x_i x_i^T basis.
    Eigen::VectorXd delta;
    double K_norm = 0.0;      ///< ||N - I||_2
    double N_min_eig = 0.0;
    double N_max_eig = 0.0;
    /// Smallest eigenvalue of the linear system matrix: M for
    /// identity_perturbation, G for least_norm.
    double M_min_eig = 0.0;
    double max_residual = 0.0;
    double condition_estimate = 0.0;
    bool solve_ok = false;
    bool singular = false;
    bool success = false;
    FitStatus status = FitStatus::singular_system;
    /// Dense N, present when d <= FitOptions::max_dense_dimension and the
    /// solve produced finite coefficients.
    std::optional<SymMatrix> ellipsoid;
};

/// N = I + sum delta_i v_i v_i^T solving the fit constraints, with
/// certificates. Never throws for a valid SampleSet.
FitResult identity_perturbation_fit(const SampleSet& s, const FitOptions& options = {});

/// Minimum-norm N satisfying x_i^T N x_i = 1 (see LeastNormObjective).
FitResult least_norm_fit(const SampleSet& s, const FitOptions& options = {});

FitResult fit(const SampleSet& s, FitMethod method, const FitOptions& options = {});

/// I + sum delta_i v_i v_i^T. Throws UsageError if delta.size() != m.
SymMatrix assemble_N(const SampleSet& s, const Eigen::VectorXd& delta);

/// max_i |x_i^T N x_i - 1|. Throws UsageError if n.order() != d.
double verify_fit(const SymMatrix& n, const SampleSet& s);

}  // namespace ellipsoid_lab
