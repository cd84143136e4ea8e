#pragma once

#include <Eigen/Core>
#include <vector>

#include "trackdens/diffusion.hpp"
#include "trackdens/track.hpp"

namespace trackdens {

enum class Anchor { origination, lysis };

/// Grid for the pre-image search. Stretch factors must stay within
/// [0.75, 1.5]; the shrink/stretch is an affine dilation of the whole
/// combined track about the chosen anchor point, evaluated separately for
/// the origination and lysis anchors.
struct PreimageConfig {
    std::vector<double> sigma_grid;    // empty: derive default_sigma_grid from the model
    std::vector<double> stretch_grid;  // empty: default_stretch_grid()
    bool anchor_origination = true;
    bool anchor_lysis = true;
    double weight_floor = 1e-10;  // weights below this are dropped and renormalized
};

struct PreimageResult {
    RegularTrack track;
    Eigen::VectorXd weights;  // simplex over the training tracks
    double sigma = 0.0;
    double stretch = 1.0;
    Anchor anchor = Anchor::origination;
    double objective = 0.0;  // |zeta - extended embedding of track|^2
};

/// Softmax of the negative squared embedded distances scaled by sigma:
/// w_i proportional to exp(-|zeta - Psi(x_i)|^2 / sigma).
Eigen::VectorXd preimage_weights(const Eigen::VectorXd& zeta, const Eigen::MatrixXd& embedding,
                                 double sigma);

/// Pointwise convex combination of the training tracks, then affine scaling
/// of every point about the anchor (first point for origination, last for
/// lysis) by the stretch factor.
RegularTrack combine_tracks(const Eigen::VectorXd& weights, const TrackSet& tracks,
                            double stretch, Anchor anchor);

/// 9 log-spaced sigmas spanning [0.1 * q25, 10 * q75] of the squared
/// pairwise embedded distances.
std::vector<double> default_sigma_grid(const Eigen::MatrixXd& embedding);

/// {0.75, 0.80, ..., 1.50}.
std::vector<double> default_stretch_grid();

/// Grid search over (sigma, stretch, anchor); every candidate combination is
/// Nystrom-extended and scored by squared embedded distance to zeta. Ties
/// break toward smaller sigma, stretch closer to 1, then the origination
/// anchor.
PreimageResult preimage(const Eigen::VectorXd& zeta, const DiffusionModel& model,
                        const PreimageConfig& config);
PreimageResult preimage(const Eigen::VectorXd& zeta, const DiffusionModel& model,
                        const Eigen::MatrixXd& embedding, const PreimageConfig& config);

/// Parallel over targets; each pre-image is a pure function of its inputs.
std::vector<PreimageResult> preimage_batch(const Eigen::MatrixXd& zetas,
                                           const DiffusionModel& model,
                                           const PreimageConfig& config);

}  // namespace trackdens
