#pragma once

#include <Eigen/Core>
#include <vector>

#include "trackdens/track.hpp"

namespace trackdens {

// Data-parallel numeric cores. Each OpenMP kernel has a serial reference
// twin with the same per-entry arithmetic; tests assert bitwise equality and
// the benchmark target compares their throughput. Parallel variants write
// disjoint output slots only, so results do not depend on thread count.

/// n x n matrix of the track metric over one set of tracks.
Eigen::MatrixXd pairwise_track_distances(const std::vector<RegularTrack>& tracks,
                                         const MetricConfig& metric = {});
Eigen::MatrixXd pairwise_track_distances_serial(const std::vector<RegularTrack>& tracks,
                                                const MetricConfig& metric = {});

/// |A| x |B| matrix of the track metric between two sets.
Eigen::MatrixXd cross_track_distances(const std::vector<RegularTrack>& a,
                                      const std::vector<RegularTrack>& b,
                                      const MetricConfig& metric = {});
Eigen::MatrixXd cross_track_distances_serial(const std::vector<RegularTrack>& a,
                                             const std::vector<RegularTrack>& b,
                                             const MetricConfig& metric = {});

/// Squared Euclidean distances between rows of a point matrix.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& points);
Eigen::MatrixXd pairwise_sq_distances_serial(const Eigen::MatrixXd& points);

/// Adaptive-bandwidth Gaussian mixture evaluation:
/// out[q] = (1/n) * sum_i h_i^-m * (2*pi)^(-m/2) * exp(-|q - x_i|^2 / (2 h_i^2)).
Eigen::VectorXd gaussian_mixture_batch(const Eigen::MatrixXd& points,
                                       const Eigen::VectorXd& bandwidths,
                                       const Eigen::MatrixXd& queries);
Eigen::VectorXd gaussian_mixture_batch_serial(const Eigen::MatrixXd& points,
                                              const Eigen::VectorXd& bandwidths,
                                              const Eigen::MatrixXd& queries);

struct NnOutcome {
    double fraction = 0.0;              // share of pooled points with a within-sample NN
    std::vector<std::uint8_t> within;   // one flag per pooled point
    std::vector<std::size_t> nn_index;  // pooled index of each point's NN
};

/// Nearest-neighbor labels on a pooled distance matrix whose first n_a
/// rows/columns belong to sample A. Ties go to the smallest pooled index.
NnOutcome nn_within_sample(const Eigen::MatrixXd& pooled, std::size_t n_a);
NnOutcome nn_within_sample_serial(const Eigen::MatrixXd& pooled, std::size_t n_a);

}  // namespace trackdens
