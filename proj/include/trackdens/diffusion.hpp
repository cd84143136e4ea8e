#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "trackdens/track.hpp"

namespace trackdens {

struct PreimageConfig;  // preimage.hpp; cross_validate takes it by reference

/// Diffusion-map model over a training track set.
///
/// The kernel is w(x,y) = exp(-dist(x,y)^2 / epsilon) and the transition
/// matrix is its row normalization. Eigenpairs are computed through the
/// symmetric conjugate S = D^-1/2 W D^-1/2 (similar to P, so the spectrum is
/// real) and converted back to right eigenvectors of P. Eigenvectors are
/// scaled so that psi_0 is identically 1 and sum_z psi_j(z)^2 phi0(z) = 1;
/// with that normalization the full-spectrum sum
///   sum_{j>=1} lambda_j^2t (psi_j(x) - psi_j(y))^2
/// equals the t-step diffusion distance exactly.
struct DiffusionModel {
    double epsilon = 0.0;
    int t = 1;
    int m = 2;
    TrackSet tracks;
    MetricConfig metric;

    Eigen::MatrixXd kernel;        // W, symmetric nonnegative
    Eigen::MatrixXd transition;    // P, row-stochastic
    Eigen::VectorXd eigenvalues;   // 1 = lambda_0 >= |lambda_1| >= ...
    Eigen::MatrixXd eigenvectors;  // columns psi_j; psi_0 constant 1
    Eigen::VectorXd stationary;    // phi_0, positive, sums to 1

    std::size_t n() const noexcept { return tracks.size(); }
};

/// Builds the model and verifies its invariants (row sums, unit top
/// eigenvalue, eigen-residuals, stationarity of phi_0); throws numeric_error
/// if any fails. Duplicate tracks only produce a warning.
DiffusionModel build_model(const TrackSet& tracks, double epsilon, int t, int m,
                           const MetricConfig& metric = {},
                           std::vector<std::string>* warnings = nullptr);

/// n x m matrix of diffusion coordinates: row x is [lambda_j^t psi_j(x)],
/// j = 1..m (the constant psi_0 is excluded).
Eigen::MatrixXd embed(const DiffusionModel& model);

/// Brute-force t-step diffusion distance squared between training points i
/// and j: explicit t-fold transition products, then the phi_0-weighted
/// squared discrepancy of the conditional distributions. Serves as the
/// oracle for the spectral identity.
double diffusion_distance_sq_exact(const DiffusionModel& model, std::size_t i, std::size_t j);

/// Partial spectral sum for the same quantity using eigenpairs 1..terms.
double diffusion_distance_sq_spectral(const DiffusionModel& model, std::size_t i, std::size_t j,
                                      int terms);

/// Exact extension of the transition matrix to an out-of-sample track:
/// kernel row against all training tracks, normalized.
Eigen::VectorXd extend_transition_row(const DiffusionModel& model, const RegularTrack& y);

/// Nystrom out-of-sample embedding: coords[j] = lambda_j^(t-1) * p(y,.) psi_j.
/// Extending a training track reproduces its embedding row exactly.
/// Throws numeric_error when |lambda_j| < 1e-12 for some j <= m.
Eigen::VectorXd nystrom_extend(const DiffusionModel& model, const RegularTrack& y);

/// Convenience: Nystrom rows for a batch of tracks (parallel over tracks).
Eigen::MatrixXd nystrom_extend_batch(const DiffusionModel& model,
                                     const std::vector<RegularTrack>& ys);

struct CvCandidate {
    double epsilon = 0.0;
    int t = 1;
};

struct CvEntry {
    CvCandidate candidate;
    double total_error = 0.0;
    bool feasible = true;
    std::vector<double> per_point_error;
};

struct CvResult {
    CvCandidate best;
    std::vector<CvEntry> table;
};

/// Default candidate grid: 7 log-spaced epsilons between the 10th and 90th
/// percentile of pairwise squared track distances, each at t in {1,2,3}.
std::vector<CvCandidate> default_cv_grid(const TrackSet& tracks, const MetricConfig& metric = {});

/// Leave-one-out cross-validation of (epsilon, t): for each candidate and
/// each held-out track, rebuild the model, Nystrom-extend the held-out
/// track, take its pre-image, and accumulate the track-space reconstruction
/// error. Ties break toward smaller epsilon, then smaller t. Candidates
/// whose model build fails are flagged infeasible instead of aborting.
CvResult cross_validate(const TrackSet& tracks, const std::vector<CvCandidate>& grid, int m,
                        const PreimageConfig& preimage_config, const MetricConfig& metric = {});

}  // namespace trackdens
