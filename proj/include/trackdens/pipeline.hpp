#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trackdens/density.hpp"
#include "trackdens/diffusion.hpp"
#include "trackdens/preimage.hpp"
#include "trackdens/track.hpp"
#include "trackdens/validation.hpp"

namespace trackdens {

struct DiffusionSpec {
    double epsilon = 0.0;   // ignored when use_median_epsilon
    bool use_median_epsilon = true;
    int t = 1;
    int m = 3;
};

struct PipelineParams {
    MetricConfig metric;
    DiffusionSpec diffusion;
    int density_k = 0;  // 0: round(sqrt(n))
    PreimageConfig preimage;
};

/// The fitted stages of the high-dimensional density estimation procedure:
/// diffusion map, embedded coordinates, and the adaptive KDE over them.
/// Immutable once fitted; samplers share it through a shared_ptr.
struct FittedPipeline {
    DiffusionModel model;
    Eigen::MatrixXd embedding;
    DensityEstimate density;
    PreimageConfig preimage;   // grids resolved against the embedding
    double epsilon_used = 0.0;

    const TrackSet& tracks() const noexcept { return model.tracks; }
};

double median_pairwise_sq_distance(const TrackSet& tracks, const MetricConfig& metric = {});

std::shared_ptr<const FittedPipeline> fit_pipeline(const TrackSet& tracks,
                                                   const PipelineParams& params);

/// Draw `count` points from the density and map each back to track space.
/// Ids are sim-<index>; deterministic in (pipeline, count, seed).
TrackSet simulate_tracks(const FittedPipeline& pipeline, std::size_t count, std::uint64_t seed);

/// Sampler closure for the validation module: every draw produces
/// observed-sized sets from the fitted density.
TrackSampler make_sampler(std::shared_ptr<const FittedPipeline> pipeline);

/// Diffusion-space coordinates of the sampled points backing a simulated
/// set (the same draws simulate_tracks would map back).
Eigen::MatrixXd sampled_coordinates(const FittedPipeline& pipeline, std::size_t count,
                                    std::uint64_t seed);

}  // namespace trackdens
