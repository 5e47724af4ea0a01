#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace ellipsoid_lab {

/// Dense real symmetric matrix.
///
/// The stored matrix is exactly symmetric (entry (i,j) and (j,i) compare
/// equal bit for bit) and every entry is finite. Both properties are checked
/// on construction; violations throw UsageError.
class SymMatrix {
public:
    SymMatrix() = default;

    /// Takes ownership of an already symmetric matrix. Throws UsageError if
    /// the input is not square, not exactly symmetric or has non-finite entries.
    explicit SymMatrix(Eigen::MatrixXd entries);

    /// Builds a SymMatrix from a nearly symmetric matrix by averaging it with
    /// its transpose. Use this for products such as V^T V whose two triangles
    /// may differ in the last bit.
    static SymMatrix symmetrized(const Eigen::MatrixXd& entries);

    static SymMatrix identity(std::size_t order);
    static SymMatrix zero(std::size_t order);
    static SymMatrix diagonal(const Eigen::VectorXd& diag);

    std::size_t order() const { return static_cast<std::size_t>(entries_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& dense() const { return entries_; }

    SymMatrix operator+(const SymMatrix& other) const;
    SymMatrix operator-(const SymMatrix& other) const;
    SymMatrix operator*(double scale) const;
    SymMatrix shifted(double t) const;  ///< this + t*I

    bool operator==(const SymMatrix& other) const { return entries_ == other.entries_; }

private:
    struct Trusted {};
    SymMatrix(Eigen::MatrixXd entries, Trusted) : entries_(std::move(entries)) {}

    Eigen::MatrixXd entries_;
};

struct SolveReport {
    Eigen::VectorXd solution;
    /// Upper-bound-style estimate of the 2-norm condition number. For a
    /// symmetric matrix kappa_2 <= kappa_1, and this is LAPACK-style
    /// estimate of kappa_1 from the LDL^T factorization.
    double condition_estimate = 0.0;
    double residual_norm = 0.0;  ///< ||a x - b||_2 after refinement
    bool ok = false;
};

/// Condition estimates above this value flag the matrix as numerically singular.
inline constexpr double kSingularConditionThreshold = 1e12;

/// Solve a x = b for symmetric a via pivoted LDL^T with one round of
/// iterative refinement. `ok` is false when the condition estimate exceeds
/// kSingularConditionThreshold or the residual exceeds 1e-9 * (1 + ||b||).
SolveReport sym_solve(const SymMatrix& a, const Eigen::VectorXd& b);

/// Reusable factorization for many right-hand sides against the same matrix.
class SymFactorization {
public:
    explicit SymFactorization(const SymMatrix& a);

    SolveReport solve(const Eigen::VectorXd& b) const;
    double condition_estimate() const { return condition_estimate_; }
    bool singular() const { return condition_estimate_ > kSingularConditionThreshold; }

private:
    Eigen::MatrixXd matrix_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    double condition_estimate_ = 0.0;
};

struct EigenRange {
    double min = 0.0;
    double max = 0.0;
};

/// Matrices of order above this use the iterative (Lanczos) path.
inline constexpr std::size_t kDenseEigenMaxOrder = 4000;

/// Smallest and largest eigenvalue. Dense symmetric eigensolver up to
/// kDenseEigenMaxOrder, Lanczos above.
EigenRange extreme_eigs(const SymMatrix& a);

/// Lanczos with full reorthogonalization. Stops when both extreme Ritz
/// values have residual below tol * max(1, ||a||), or after
/// max_iterations steps (default 10 * order, clipped to the Krylov limit).
EigenRange extreme_eigs_lanczos(const SymMatrix& a, double tol = 1e-8,
                                std::optional<std::size_t> max_iterations = std::nullopt);

/// max(|lambda_min|, |lambda_max|).
double operator_norm(const SymMatrix& a);

/// Unit eigenvector belonging to the eigenvalue of largest magnitude.
Eigen::VectorXd dominant_eigenvector(const SymMatrix& a);

/// Extreme eigenvalues of shift * I + U diag(w) U^T without forming the
/// d x d matrix (U is d x k). With U = QR (thin QR, r = min(d, k) columns in
/// Q) the nonzero spectrum of U diag(w) U^T is that of the r x r matrix
/// R diag(w) R^T; when r < d the eigenvalue `shift` is added for the
/// orthogonal complement.
EigenRange low_rank_extreme_eigs(const Eigen::MatrixXd& u, const Eigen::VectorXd& w, double shift);

/// Dominant (largest |lambda|) unit eigenvector of U diag(w) U^T, same
/// factorization as low_rank_extreme_eigs.
Eigen::VectorXd low_rank_dominant_eigenvector(const Eigen::MatrixXd& u, const Eigen::VectorXd& w);

/// tr(a^t) for even t >= 2, computed as ||a^{t/2}||_F^2.
double trace_even_power(const SymMatrix& a, int t);

}  // namespace ellipsoid_lab
