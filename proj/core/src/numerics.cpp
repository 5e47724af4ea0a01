#include "ellipsoid_lab/numerics.hpp"

#include "ellipsoid_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ellipsoid_lab {
namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) {
        throw UsageError(std::string(what) + ": non-finite entries");
    }
}

EigenRange dense_extreme_eigs(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) {
        return {0.0, 0.0};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    const auto& values = solver.eigenvalues();
    return {values(0), values(values.size() - 1)};
}

// Thin QR of u: returns R (r x k) with r = min(d, k).
Eigen::MatrixXd thin_r(const Eigen::HouseholderQR<Eigen::MatrixXd>& qr, Eigen::Index r) {
    Eigen::MatrixXd full = qr.matrixQR().topRows(r);
    return full.triangularView<Eigen::Upper>();
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw UsageError("SymMatrix: matrix is not square");
    }
    require_finite(entries_, "SymMatrix");
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < entries_.rows(); ++i) {
            if (entries_(i, j) != entries_(j, i)) {
                throw UsageError("SymMatrix: matrix is not symmetric");
            }
        }
    }
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& entries) {
    if (entries.rows() != entries.cols()) {
        throw UsageError("SymMatrix: matrix is not square");
    }
    require_finite(entries, "SymMatrix");
    Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
    return SymMatrix(std::move(sym), Trusted{});
}

SymMatrix SymMatrix::identity(std::size_t order) {
    const auto n = static_cast<Eigen::Index>(order);
    return SymMatrix(Eigen::MatrixXd::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::zero(std::size_t order) {
    const auto n = static_cast<Eigen::Index>(order);
    return SymMatrix(Eigen::MatrixXd::Zero(n, n), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
    require_finite(diag, "SymMatrix::diagonal");
    return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()), Trusted{});
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
    if (order() != other.order()) {
        throw UsageError("SymMatrix: order mismatch in +");
    }
    return SymMatrix(entries_ + other.entries_, Trusted{});
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
    if (order() != other.order()) {
        throw UsageError("SymMatrix: order mismatch in -");
    }
    return SymMatrix(entries_ - other.entries_, Trusted{});
}

SymMatrix SymMatrix::operator*(double scale) const {
    if (!std::isfinite(scale)) {
        throw UsageError("SymMatrix: non-finite scale");
    }
    return SymMatrix(entries_ * scale, Trusted{});
}

SymMatrix SymMatrix::shifted(double t) const {
    if (!std::isfinite(t)) {
        throw UsageError("SymMatrix: non-finite shift");
    }
    Eigen::MatrixXd out = entries_;
    out.diagonal().array() += t;
    return SymMatrix(std::move(out), Trusted{});
}

SymFactorization::SymFactorization(const SymMatrix& a) : matrix_(a.dense()), ldlt_(matrix_) {
    if (ldlt_.info() != Eigen::Success) {
        condition_estimate_ = std::numeric_limits<double>::infinity();
        return;
    }
    // LDLT zeroes out exactly singular pivots instead of failing, which the
    // rcond estimator then misses; the pivot spread catches that case.
    const Eigen::VectorXd pivots = ldlt_.vectorD().cwiseAbs();
    const double pivot_min = pivots.size() > 0 ? pivots.minCoeff() : 1.0;
    const double pivot_ratio =
        pivot_min > 0.0 ? pivots.maxCoeff() / pivot_min : std::numeric_limits<double>::infinity();
    const double rcond = ldlt_.rcond();
    const double from_rcond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    condition_estimate_ = std::max(from_rcond, pivot_ratio);
}

SolveReport SymFactorization::solve(const Eigen::VectorXd& b) const {
    if (b.size() != matrix_.rows()) {
        throw UsageError("sym_solve: dimension mismatch (order " + std::to_string(matrix_.rows()) +
                         ", rhs length " + std::to_string(b.size()) + ")");
    }
    if (!b.allFinite()) {
        throw UsageError("sym_solve: non-finite right-hand side");
    }
    SolveReport report;
    report.condition_estimate = condition_estimate_;
    if (matrix_.rows() == 0) {
        report.ok = true;
        return report;
    }
    if (ldlt_.info() != Eigen::Success) {
        report.solution = Eigen::VectorXd::Constant(b.size(), std::numeric_limits<double>::quiet_NaN());
        report.residual_norm = std::numeric_limits<double>::infinity();
        return report;
    }

    Eigen::VectorXd x = ldlt_.solve(b);
    Eigen::VectorXd r = b - matrix_ * x;
    x += ldlt_.solve(r);
    r = b - matrix_ * x;

    report.residual_norm = x.allFinite() ? r.norm() : std::numeric_limits<double>::infinity();
    report.solution = std::move(x);
    const double tol = 1e-9 * (1.0 + b.norm());
    report.ok = !singular() && report.residual_norm <= tol;
    return report;
}

SolveReport sym_solve(const SymMatrix& a, const Eigen::VectorXd& b) {
    if (static_cast<Eigen::Index>(a.order()) != b.size()) {
        throw UsageError("sym_solve: dimension mismatch (order " + std::to_string(a.order()) +
                         ", rhs length " + std::to_string(b.size()) + ")");
    }
    return SymFactorization(a).solve(b);
}

EigenRange extreme_eigs(const SymMatrix& a) {
    if (a.order() <= kDenseEigenMaxOrder) {
        return dense_extreme_eigs(a.dense());
    }
    return extreme_eigs_lanczos(a);
}

EigenRange extreme_eigs_lanczos(const SymMatrix& a, double tol, std::optional<std::size_t> max_iterations) {
    const Eigen::Index n = static_cast<Eigen::Index>(a.order());
    if (n == 0) {
        return {0.0, 0.0};
    }
    if (n == 1) {
        return {a(0, 0), a(0, 0)};
    }
    const auto& mat = a.dense();
    const double scale = std::max(1.0, mat.cwiseAbs().rowwise().sum().maxCoeff());
    const std::size_t cap = std::min<std::size_t>(max_iterations.value_or(10 * a.order()), a.order());
    const Eigen::Index steps = static_cast<Eigen::Index>(std::max<std::size_t>(cap, 1));

    Eigen::MatrixXd basis(n, steps);
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[k] couples q_k and q_{k+1}

    // Deterministic start vector with no special alignment to coordinate axes.
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        q(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
    }
    q.normalize();

    EigenRange best{0.0, 0.0};
    Eigen::Index restart_seed = 1;
    // After a restart the tridiagonal matrix is block diagonal and the
    // residual test no longer covers the earlier blocks, so run to the cap.
    bool restarted = false;
    for (Eigen::Index k = 0; k < steps; ++k) {
        basis.col(k) = q;
        Eigen::VectorXd w = mat * q;
        const double a_k = q.dot(w);
        alpha.push_back(a_k);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            auto block = basis.leftCols(k + 1);
            w -= block * (block.transpose() * w);
        }
        double b_k = w.norm();

        const bool last = (k + 1 == steps);
        const bool check = last || (k + 1) % 10 == 0 || b_k <= 1e-13 * scale;
        if (check) {
            const Eigen::Index size = k + 1;
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
            for (Eigen::Index i = 0; i < size; ++i) {
                t(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < size) {
                    t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
            const auto& vals = ritz.eigenvalues();
            const auto& vecs = ritz.eigenvectors();
            best = {vals(0), vals(size - 1)};
            const double res_min = std::abs(b_k * vecs(size - 1, 0));
            const double res_max = std::abs(b_k * vecs(size - 1, size - 1));
            const bool converged = !restarted && b_k > 1e-13 * scale && res_min <= tol * scale &&
                                   res_max <= tol * scale && size >= 2;
            if (last || converged) {
                return best;
            }
        }

        if (b_k <= 1e-13 * scale) {
            // Invariant subspace reached; continue with a fresh direction
            // orthogonal to everything seen so far.
            Eigen::VectorXd fresh(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                fresh(i) = std::cos(1.3 * static_cast<double>((i + 1) * (restart_seed + 2)));
            }
            ++restart_seed;
            auto block = basis.leftCols(k + 1);
            for (int pass = 0; pass < 2; ++pass) {
                fresh -= block * (block.transpose() * fresh);
            }
            if (fresh.norm() <= 1e-13) {
                return best;
            }
            w = fresh;
            b_k = 0.0;
            restarted = true;
            q = w.normalized();
        } else {
            q = w / b_k;
        }
        beta.push_back(b_k);
    }
    return best;
}

double operator_norm(const SymMatrix& a) {
    const auto range = extreme_eigs(a);
    return std::max(std::abs(range.min), std::abs(range.max));
}

Eigen::VectorXd dominant_eigenvector(const SymMatrix& a) {
    if (a.order() == 0) {
        throw UsageError("dominant_eigenvector: empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense());
    const auto& values = solver.eigenvalues();
    const Eigen::Index last = values.size() - 1;
    const Eigen::Index pick = std::abs(values(0)) > std::abs(values(last)) ? 0 : last;
    return solver.eigenvectors().col(pick);
}

EigenRange low_rank_extreme_eigs(const Eigen::MatrixXd& u, const Eigen::VectorXd& w, double shift) {
    if (u.cols() != w.size()) {
        throw UsageError("low_rank_extreme_eigs: weight length does not match factor columns");
    }
    require_finite(u, "low_rank_extreme_eigs");
    require_finite(w, "low_rank_extreme_eigs");
    const Eigen::Index d = u.rows();
    if (u.cols() == 0) {
        return {shift, shift};
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
    const Eigen::Index r = std::min(d, u.cols());
    const Eigen::MatrixXd rf = thin_r(qr, r);
    const Eigen::MatrixXd core = rf * w.asDiagonal() * rf.transpose();
    EigenRange range = dense_extreme_eigs(0.5 * (core + core.transpose()));
    range.min += shift;
    range.max += shift;
    if (r < d) {
        range.min = std::min(range.min, shift);
        range.max = std::max(range.max, shift);
    }
    return range;
}

Eigen::VectorXd low_rank_dominant_eigenvector(const Eigen::MatrixXd& u, const Eigen::VectorXd& w) {
    if (u.cols() != w.size()) {
        throw UsageError("low_rank_dominant_eigenvector: weight length does not match factor columns");
    }
    const Eigen::Index d = u.rows();
    if (d == 0) {
        throw UsageError("low_rank_dominant_eigenvector: empty factor");
    }
    if (u.cols() == 0) {
        return Eigen::VectorXd::Unit(d, 0);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
    const Eigen::Index r = std::min(d, u.cols());
    const Eigen::MatrixXd rf = thin_r(qr, r);
    const Eigen::MatrixXd core = rf * w.asDiagonal() * rf.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (core + core.transpose()));
    const auto& values = solver.eigenvalues();
    const Eigen::Index last = values.size() - 1;
    const Eigen::Index pick = std::abs(values(0)) > std::abs(values(last)) ? 0 : last;
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
    Eigen::VectorXd v = q * solver.eigenvectors().col(pick);
    return v.normalized();
}

double trace_even_power(const SymMatrix& a, int t) {
    if (t < 2 || t % 2 != 0) {
        throw UsageError("trace_even_power: t must be an even integer >= 2, got " + std::to_string(t));
    }
    const Eigen::MatrixXd& base = a.dense();
    Eigen::MatrixXd half = base;
    for (int k = 1; k < t / 2; ++k) {
        half = (half * base).eval();
    }
    return half.squaredNorm();
}

}  // namespace ellipsoid_lab
