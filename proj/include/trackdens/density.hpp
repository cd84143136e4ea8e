#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace trackdens {

/// k-nearest-neighbor kernel density estimate over embedded points: each
/// training point carries its own bandwidth (distance to its k-th nearest
/// neighbor), so the estimate adapts to the uneven concentration the
/// embedding produces near its boundary. The kernel is the standard
/// m-variate Gaussian, which makes smoothed-bootstrap sampling exact for
/// the evaluated density.
struct DensityEstimate {
    Eigen::MatrixXd points;      // n x m
    int k = 0;
    Eigen::VectorXd bandwidths;  // n, strictly positive

    std::size_t n() const noexcept { return static_cast<std::size_t>(points.rows()); }
    int m() const noexcept { return static_cast<int>(points.cols()); }
};

/// Default neighbor count: round(sqrt(n)).
int default_density_k(std::size_t n);

/// Throws numeric_error when some point has k+1 coincident copies (zero
/// bandwidth), naming the offending points.
DensityEstimate fit_knn_kde(const Eigen::MatrixXd& points, int k);

double kde_evaluate(const DensityEstimate& estimate, const Eigen::VectorXd& z);

/// Batch evaluation (OpenMP; serial twin in kernels.hpp drives the tests).
Eigen::VectorXd kde_evaluate_batch(const DensityEstimate& estimate, const Eigen::MatrixXd& queries);

/// Smoothed bootstrap: draw a training index uniformly and add h_i-scaled
/// Gaussian noise. Draw d depends only on (seed, d), so any parallel
/// chunking of the draws yields identical output.
Eigen::MatrixXd kde_sample(const DensityEstimate& estimate, std::size_t count, std::uint64_t seed);

}  // namespace trackdens
