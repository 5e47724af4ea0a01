#pragma once

#include "ellipsoid_lab/numerics.hpp"
#include "ellipsoid_lab/sampling.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace ellipsoid_lab {

/// Squared-Gram system of a SampleSet.
///
///   M_ij = (v_i . v_j)^2
///   A    = M - (1 - 1/d) I - (1/d) 1 1^T    (zero diagonal)
///   A    = A' + A*                           (degree-2 Hermite split)
struct GramSystem {
    SymMatrix M;
    SymMatrix A;
    SymMatrix A_prime;
    SymMatrix A_star;
    std::size_t d = 0;
};

/// Degree-2 Hermite feature values of one unit vector y in R^d.
///
/// Ordering is fixed: `cross` holds y_i y_j for (i, j) in lexicographic
/// order with i < j (d(d-1)/2 values), `squares` holds (y_i^2 - 1/d)/sqrt(2)
/// for i = 0..d-1.
struct HermiteFeatures {
    Eigen::VectorXd cross;
    Eigen::VectorXd squares;
};

struct HermiteSplit {
    SymMatrix A_prime;
    SymMatrix A_star;
};

/// Deviations of A* - 2 B B^T from its predicted form: zero off the
/// diagonal and -sum_k (v_ik^2 - 1/d)^2 on it.
struct StarGramCheck {
    double max_offdiag_deviation = 0.0;
    double max_diag_deviation = 0.0;
};

struct TraceMoment {
    double mean_trace = 0.0;
    double standard_error = 0.0;
    double bound = 0.0;  ///< m (m (4t)^4 / d^2)^{t/2}
    double ratio = 0.0;  ///< mean_trace / bound
};

SymMatrix build_M(const SampleSet& s);
SymMatrix build_A(const SampleSet& s);

/// A from an already built M (avoids recomputing V^T V).
SymMatrix centered_noise(const SymMatrix& M, std::size_t d);

/// Throws UsageError unless ||v|| = 1 +- 1e-10 and v.size() == d.
HermiteFeatures hermite_features(const Eigen::VectorXd& v, std::size_t d);

/// m x d matrix B with B_ik = (v_ik^2 - 1/d)/sqrt(2).
Eigen::MatrixXd square_feature_matrix(const SampleSet& s);

/// A* = offdiag(2 B B^T), A' = A - A*. Cost O(m^2 d).
HermiteSplit split_A(const SampleSet& s);

/// A' built from the explicit cross features (O(m^2 d^2)); for
/// cross-checking split_A on small instances.
SymMatrix a_prime_explicit(const SampleSet& s);

StarGramCheck a_star_gram_check(const SampleSet& s);

GramSystem build_gram_system(const SampleSet& s);

/// Monte Carlo mean of tr((A')^t) over `trials` fresh sample sets with seeds
/// mix64({seed, trial}). t must be even with 2 <= t <= 8.
TraceMoment trace_moment(std::size_t d, std::size_t m, int t, std::size_t trials, std::uint64_t seed,
                         std::size_t workers = 1);

/// m (m (4t)^4 / d^2)^{t/2}.
double trace_moment_bound(std::size_t d, std::size_t m, int t);

}  // namespace ellipsoid_lab
