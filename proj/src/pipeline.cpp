#include "trackdens/pipeline.hpp"

#include <utility>

#include "trackdens/kernels.hpp"
#include "trackdens/stats.hpp"

namespace trackdens {

double median_pairwise_sq_distance(const TrackSet& tracks, const MetricConfig& metric) {
    const Eigen::MatrixXd dist = pairwise_track_distances(tracks.tracks, metric);
    std::vector<double> sq;
    sq.reserve(tracks.size() * (tracks.size() - 1) / 2);
    for (Eigen::Index i = 0; i < dist.rows(); ++i)
        for (Eigen::Index j = i + 1; j < dist.cols(); ++j) sq.push_back(dist(i, j) * dist(i, j));
    return median(std::move(sq));
}

std::shared_ptr<const FittedPipeline> fit_pipeline(const TrackSet& tracks,
                                                   const PipelineParams& params) {
    auto fitted = std::make_shared<FittedPipeline>();
    fitted->epsilon_used = params.diffusion.use_median_epsilon
                               ? median_pairwise_sq_distance(tracks, params.metric)
                               : params.diffusion.epsilon;
    fitted->model = build_model(tracks, fitted->epsilon_used, params.diffusion.t,
                                params.diffusion.m, params.metric);
    fitted->embedding = embed(fitted->model);
    const int k = params.density_k > 0 ? params.density_k : default_density_k(tracks.size());
    fitted->density = fit_knn_kde(fitted->embedding, k);
    fitted->preimage = params.preimage;
    if (fitted->preimage.sigma_grid.empty())
        fitted->preimage.sigma_grid = default_sigma_grid(fitted->embedding);
    if (fitted->preimage.stretch_grid.empty())
        fitted->preimage.stretch_grid = default_stretch_grid();
    return fitted;
}

Eigen::MatrixXd sampled_coordinates(const FittedPipeline& pipeline, std::size_t count,
                                    std::uint64_t seed) {
    return kde_sample(pipeline.density, count, seed);
}

TrackSet simulate_tracks(const FittedPipeline& pipeline, std::size_t count, std::uint64_t seed) {
    const Eigen::MatrixXd draws = kde_sample(pipeline.density, count, seed);
    std::vector<PreimageResult> inverted =
        preimage_batch(draws, pipeline.model, pipeline.preimage);
    TrackSet simulated;
    simulated.tracks.reserve(count);
    for (std::size_t i = 0; i < inverted.size(); ++i) {
        RegularTrack track = std::move(inverted[i].track);
        track.id = "sim-" + std::to_string(i);
        simulated.tracks.push_back(std::move(track));
    }
    return simulated;
}

TrackSampler make_sampler(std::shared_ptr<const FittedPipeline> pipeline) {
    const std::size_t n = pipeline->tracks().size();
    return [pipeline, n](std::uint64_t seed) { return simulate_tracks(*pipeline, n, seed); };
}

}  // namespace trackdens
