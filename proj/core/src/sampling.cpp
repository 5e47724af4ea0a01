#include "ellipsoid_lab/sampling.hpp"

#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/seeding.hpp"

#include <cmath>
#include <string>

namespace ellipsoid_lab {
namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kMinSquaredNorm = 1e-300;

MomentEstimate mean_and_stderr(double sum, double sum_sq, std::size_t n) {
    const double count = static_cast<double>(n);
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    return {mean, std::sqrt(var / count)};
}

}  // namespace

SampleSet::SampleSet(Eigen::MatrixXd directions, Eigen::VectorXd eps, std::uint64_t seed)
    : directions_(std::move(directions)), eps_(std::move(eps)), seed_(seed) {
    if (directions_.cols() != eps_.size()) {
        throw UsageError("SampleSet: " + std::to_string(directions_.cols()) + " directions but " +
                         std::to_string(eps_.size()) + " length parameters");
    }
    if (directions_.rows() < 1) {
        throw UsageError("SampleSet: dimension must be >= 1");
    }
    if (!directions_.allFinite() || !eps_.allFinite()) {
        throw UsageError("SampleSet: non-finite entries");
    }
    for (Eigen::Index i = 0; i < directions_.cols(); ++i) {
        if (std::abs(directions_.col(i).norm() - 1.0) > kUnitTolerance) {
            throw UsageError("SampleSet: direction " + std::to_string(i) + " is not a unit vector");
        }
        if (!(eps_(i) > -1.0)) {
            throw UsageError("SampleSet: eps[" + std::to_string(i) + "] must exceed -1");
        }
    }
}

SampleSet SampleSet::from_points(const Eigen::MatrixXd& points, std::uint64_t seed) {
    Eigen::MatrixXd dirs(points.rows(), points.cols());
    Eigen::VectorXd eps(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        auto parts = decompose(points.col(i));
        dirs.col(i) = parts.direction;
        eps(i) = parts.eps;
    }
    return SampleSet(std::move(dirs), std::move(eps), seed);
}

Eigen::VectorXd SampleSet::point(std::size_t i) const {
    const auto idx = static_cast<Eigen::Index>(i);
    return directions_.col(idx) / std::sqrt(1.0 + eps_(idx));
}

Eigen::MatrixXd SampleSet::points() const {
    Eigen::VectorXd scale = (1.0 + eps_.array()).rsqrt();
    return directions_ * scale.asDiagonal();
}

SampleSet SampleSet::prefix(std::size_t k) const {
    if (k > m()) {
        throw UsageError("SampleSet::prefix: k exceeds m");
    }
    const auto n = static_cast<Eigen::Index>(k);
    return SampleSet(directions_.leftCols(n), eps_.head(n), seed_);
}

Eigen::VectorXd sample_gaussian(std::size_t d, Rng& rng) {
    if (d == 0) {
        throw UsageError("sample_gaussian: dimension must be >= 1");
    }
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        x(k) = normal(rng);
    }
    return x;
}

Decomposition decompose(const Eigen::VectorXd& x) {
    if (!x.allFinite()) {
        throw UsageError("decompose: non-finite input");
    }
    const double sq = x.squaredNorm();
    if (!(sq >= kMinSquaredNorm)) {
        throw DegenerateInputError("decompose: vector is numerically zero (squared norm " +
                                   std::to_string(sq) + ")");
    }
    return {x / std::sqrt(sq), 1.0 / sq - 1.0};
}

Rng point_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64({seed, index}));
}

SampleSet draw_sample_set(std::size_t d, std::size_t m, std::uint64_t seed) {
    if (d < 1 || m < 1) {
        throw UsageError("draw_sample_set: need d >= 1 and m >= 1");
    }
    Eigen::MatrixXd dirs(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    Eigen::VectorXd eps(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        Rng rng = point_stream(seed, i);
        auto parts = decompose(sample_gaussian(d, rng));
        dirs.col(static_cast<Eigen::Index>(i)) = parts.direction;
        eps(static_cast<Eigen::Index>(i)) = parts.eps;
    }
    return SampleSet(std::move(dirs), std::move(eps), seed);
}

Eigen::VectorXd random_unit_vector(std::size_t d, Rng& rng) {
    return decompose(sample_gaussian(d, rng)).direction;
}

MomentEstimate sphere_moment_estimate(std::size_t d, int k, std::size_t n, std::uint64_t seed) {
    if (k != 1 && k != 2 && k != 4) {
        throw UsageError("sphere_moment_estimate: moment order must be 1, 2 or 4, got " + std::to_string(k));
    }
    if (n < 100) {
        throw UsageError("sphere_moment_estimate: need at least 100 trials");
    }
    if (d < 1) {
        throw UsageError("sphere_moment_estimate: dimension must be >= 1");
    }
    Rng rng(mix64({seed, d, static_cast<std::uint64_t>(k)}));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t trial = 0; trial < n; ++trial) {
        const double proj = random_unit_vector(d, rng)(0);
        const double value = std::pow(proj, k);
        sum += value;
        sum_sq += value * value;
    }
    return mean_and_stderr(sum, sum_sq, n);
}

MomentEstimate sphere_tail_estimate(std::size_t d, double t, std::size_t n, std::uint64_t seed) {
    if (n < 100) {
        throw UsageError("sphere_tail_estimate: need at least 100 trials");
    }
    if (d < 1) {
        throw UsageError("sphere_tail_estimate: dimension must be >= 1");
    }
    Rng rng(mix64({seed, d, 0x7a11ULL}));
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < n; ++trial) {
        if (std::abs(random_unit_vector(d, rng)(0)) > t) {
            ++hits;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace ellipsoid_lab
