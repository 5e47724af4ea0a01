#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>

namespace ellipsoid_lab {

using Rng = std::mt19937_64;

/// m points in R^d stored by direction and length parameter:
/// x_i = (1 + eps_i)^{-1/2} v_i with ||v_i|| = 1 and eps_i = 1/||x_i||^2 - 1.
class SampleSet {
public:
    /// Validates unit directions (to 1e-12) and eps_i > -1; throws UsageError.
    SampleSet(Eigen::MatrixXd directions, Eigen::VectorXd eps, std::uint64_t seed = 0);

    /// Decomposes each column of `points`; throws DegenerateInputError on a
    /// (near) zero column.
    static SampleSet from_points(const Eigen::MatrixXd& points, std::uint64_t seed = 0);

    std::size_t d() const { return static_cast<std::size_t>(directions_.rows()); }
    std::size_t m() const { return static_cast<std::size_t>(directions_.cols()); }
    std::uint64_t seed() const { return seed_; }

    /// d x m, column i is v_i.
    const Eigen::MatrixXd& directions() const { return directions_; }
    const Eigen::VectorXd& eps() const { return eps_; }

    /// x_i reconstructed from (v_i, eps_i).
    Eigen::VectorXd point(std::size_t i) const;
    /// d x m, column i is x_i.
    Eigen::MatrixXd points() const;

    /// First k points, identical to draw_sample_set(d, k, seed) for drawn sets.
    SampleSet prefix(std::size_t k) const;

private:
    Eigen::MatrixXd directions_;
    Eigen::VectorXd eps_;
    std::uint64_t seed_ = 0;
};

struct Decomposition {
    Eigen::VectorXd direction;
    double eps = 0.0;
};

/// One draw from N(0, (1/d) I_d). Throws UsageError for d == 0.
Eigen::VectorXd sample_gaussian(std::size_t d, Rng& rng);

/// x -> (x / ||x||, 1/||x||^2 - 1). Throws DegenerateInputError when
/// ||x||^2 < 1e-300.
Decomposition decompose(const Eigen::VectorXd& x);

/// Engine for point `index` of a set drawn with `seed`:
/// Rng(mix64({seed, index})). Any prefix of a set is therefore independent
/// of the total count m.
Rng point_stream(std::uint64_t seed, std::uint64_t index);

/// m independent N(0, I_d/d) points, decomposed.
SampleSet draw_sample_set(std::size_t d, std::size_t m, std::uint64_t seed);

/// Uniform random unit vector in R^d.
Eigen::VectorXd random_unit_vector(std::size_t d, Rng& rng);

struct MomentEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Monte Carlo estimate of E[(v . e_1)^k] for v uniform on the unit sphere.
/// k must be 1, 2 or 4 and n >= 100; otherwise UsageError.
MomentEstimate sphere_moment_estimate(std::size_t d, int k, std::size_t n, std::uint64_t seed);

/// Empirical Pr(|v . e_1| > t) for v uniform on the unit sphere, with its
/// binomial standard error.
MomentEstimate sphere_tail_estimate(std::size_t d, double t, std::size_t n, std::uint64_t seed);

}  // namespace ellipsoid_lab
