#include "ellipsoid_lab/gram.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/parallel.hpp"
#include "ellipsoid_lab/seeding.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ellipsoid_lab {
namespace {

Eigen::MatrixXd squared_gram(const SampleSet& s) {
    const auto& v = s.directions();
    Eigen::MatrixXd g = v.transpose() * v;
    return g.cwiseAbs2();
}

void check_trace_order(int t) {
    if (t < 2 || t > 8 || t % 2 != 0) {
        throw UsageError("trace moment order t must be even with 2 <= t <= 8, got " + std::to_string(t));
    }
}

}  // namespace

SymMatrix build_M(const SampleSet& s) {
    return SymMatrix::symmetrized(squared_gram(s));
}

SymMatrix centered_noise(const SymMatrix& M, std::size_t d) {
    const double inv_d = 1.0 / static_cast<double>(d);
    Eigen::MatrixXd a = M.dense().array() - inv_d;
    a.diagonal().setZero();
    return SymMatrix(std::move(a));
}

SymMatrix build_A(const SampleSet& s) {
    return centered_noise(build_M(s), s.d());
}

HermiteFeatures hermite_features(const Eigen::VectorXd& v, std::size_t d) {
    if (static_cast<std::size_t>(v.size()) != d) {
        throw UsageError("hermite_features: vector length does not match d");
    }
    if (std::abs(v.norm() - 1.0) > 1e-10) {
        throw UsageError("hermite_features: input must be a unit vector");
    }
    const auto n = static_cast<Eigen::Index>(d);
    HermiteFeatures f;
    f.cross.resize(n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            f.cross(k++) = v(i) * v(j);
        }
    }
    f.squares = (v.array().square() - 1.0 / static_cast<double>(d)) / std::sqrt(2.0);
    return f;
}

Eigen::MatrixXd square_feature_matrix(const SampleSet& s) {
    const double inv_d = 1.0 / static_cast<double>(s.d());
    Eigen::MatrixXd b = s.directions().transpose();
    return (b.array().square() - inv_d) / std::sqrt(2.0);
}

HermiteSplit split_A(const SampleSet& s) {
    const Eigen::MatrixXd b = square_feature_matrix(s);
    Eigen::MatrixXd star = 2.0 * (b * b.transpose());
    star.diagonal().setZero();
    SymMatrix a_star = SymMatrix::symmetrized(star);
    SymMatrix a_prime = build_A(s) - a_star;
    return {std::move(a_prime), std::move(a_star)};
}

SymMatrix a_prime_explicit(const SampleSet& s) {
    const auto m = static_cast<Eigen::Index>(s.m());
    const auto pairs = static_cast<Eigen::Index>(s.d() * (s.d() - 1) / 2);
    Eigen::MatrixXd cross(m, pairs);
    for (Eigen::Index i = 0; i < m; ++i) {
        cross.row(i) = hermite_features(s.directions().col(i), s.d()).cross.transpose();
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double value = 2.0 * cross.row(i).dot(cross.row(j));
            a(i, j) = value;
            a(j, i) = value;
        }
    }
    return SymMatrix(std::move(a));
}

StarGramCheck a_star_gram_check(const SampleSet& s) {
    const Eigen::MatrixXd b = square_feature_matrix(s);
    const SymMatrix a_star = split_A(s).A_star;
    const Eigen::MatrixXd diff = a_star.dense() - 2.0 * (b * b.transpose());
    const double inv_d = 1.0 / static_cast<double>(s.d());

    StarGramCheck check;
    for (Eigen::Index i = 0; i < diff.rows(); ++i) {
        for (Eigen::Index j = 0; j < diff.cols(); ++j) {
            if (i == j) {
                const double expected = -(s.directions().col(i).array().square() - inv_d).square().sum();
                check.max_diag_deviation = std::max(check.max_diag_deviation, std::abs(diff(i, i) - expected));
            } else {
                check.max_offdiag_deviation = std::max(check.max_offdiag_deviation, std::abs(diff(i, j)));
            }
        }
    }
    return check;
}

GramSystem build_gram_system(const SampleSet& s) {
    SymMatrix M = build_M(s);
    SymMatrix A = centered_noise(M, s.d());
    auto split = split_A(s);
    return {std::move(M), std::move(A), std::move(split.A_prime), std::move(split.A_star), s.d()};
}

double trace_moment_bound(std::size_t d, std::size_t m, int t) {
    check_trace_order(t);
    const double md = static_cast<double>(m);
    const double dd = static_cast<double>(d);
    const double base = md * std::pow(4.0 * t, 4) / (dd * dd);
    return md * std::pow(base, t / 2);
}

TraceMoment trace_moment(std::size_t d, std::size_t m, int t, std::size_t trials, std::uint64_t seed,
                         std::size_t workers) {
    check_trace_order(t);
    if (d < 1 || m < 1 || trials < 1) {
        throw UsageError("trace_moment: need d >= 1, m >= 1 and trials >= 1");
    }
    std::vector<double> traces(trials, 0.0);
    parallel_for(trials, workers, [&](std::size_t trial) {
        const SampleSet s = draw_sample_set(d, m, mix64({seed, trial}));
        traces[trial] = trace_even_power(split_A(s).A_prime, t);
    });

    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : traces) {
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(trials);
    TraceMoment out;
    out.mean_trace = sum / n;
    out.standard_error =
        trials > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * out.mean_trace * out.mean_trace) / (n - 1.0)) / n) : 0.0;
    out.bound = trace_moment_bound(d, m, t);
    out.ratio = out.mean_trace / out.bound;
    return out;
}

}  // namespace ellipsoid_lab
