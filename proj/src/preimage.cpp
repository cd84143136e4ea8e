#include "trackdens/preimage.hpp"

#include <exception>
#include <cmath>
#include <stdexcept>

#include "trackdens/error.hpp"
#include "trackdens/kernels.hpp"
#include "trackdens/stats.hpp"

namespace trackdens {

Eigen::VectorXd preimage_weights(const Eigen::VectorXd& zeta, const Eigen::MatrixXd& embedding,
                                 double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("preimage_weights: sigma must be positive");
    if (zeta.size() != embedding.cols())
        throw std::invalid_argument("preimage_weights: dimension mismatch");
    if (!zeta.allFinite() || !embedding.allFinite())
        throw numeric_error("preimage_weights: non-finite embedded distance");

    const Eigen::Index n = embedding.rows();
    Eigen::VectorXd exponent(n);
    for (Eigen::Index i = 0; i < n; ++i)
        exponent(i) = -(zeta.transpose() - embedding.row(i)).squaredNorm() / sigma;
    const double peak = exponent.maxCoeff();
    const Eigen::VectorXd unnorm = (exponent.array() - peak).exp();
    return unnorm / unnorm.sum();
}

RegularTrack combine_tracks(const Eigen::VectorXd& weights, const TrackSet& tracks,
                            double stretch, Anchor anchor) {
    if (static_cast<std::size_t>(weights.size()) != tracks.size())
        throw std::invalid_argument("combine_tracks: weight count != track count");
    if (stretch < 0.75 || stretch > 1.5)
        throw std::invalid_argument("combine_tracks: stretch outside [0.75, 1.5]");

    const std::size_t p = tracks.p();
    RegularTrack out;
    out.points.assign(p, GeoPoint{0.0, 0.0});
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double w = weights(i);
        if (w == 0.0) continue;
        const auto& pts = tracks.tracks[static_cast<std::size_t>(i)].points;
        for (std::size_t j = 0; j < p; ++j) {
            out.points[j].lon += w * pts[j].lon;
            out.points[j].lat += w * pts[j].lat;
        }
    }
    if (stretch != 1.0) {
        const GeoPoint a = (anchor == Anchor::origination) ? out.points.front() : out.points.back();
        for (auto& pt : out.points) {
            pt.lon = a.lon + stretch * (pt.lon - a.lon);
            pt.lat = a.lat + stretch * (pt.lat - a.lat);
        }
    }
    return out;
}

std::vector<double> default_sigma_grid(const Eigen::MatrixXd& embedding) {
    const Eigen::MatrixXd sq = pairwise_sq_distances(embedding);
    std::vector<double> upper;
    upper.reserve(static_cast<std::size_t>(sq.rows()) * (static_cast<std::size_t>(sq.rows()) - 1) / 2);
    for (Eigen::Index i = 0; i < sq.rows(); ++i)
        for (Eigen::Index j = i + 1; j < sq.cols(); ++j) upper.push_back(sq(i, j));
    const double q25 = percentile(upper, 0.25);
    const double q75 = percentile(upper, 0.75);
    double hi = 10.0 * q75;
    if (!(hi > 0.0)) hi = 1.0;  // fully degenerate embedding
    double lo = 0.1 * q25;
    if (!(lo > 0.0)) lo = hi * 1e-6;
    return log_spaced(lo, hi, 9);
}

std::vector<double> default_stretch_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 15; ++i) grid.push_back(0.75 + 0.05 * static_cast<double>(i));
    return grid;
}

namespace {

struct CandidateKey {
    double objective;
    double sigma;
    double stretch_dist;  // |stretch - 1|
    double stretch;
    int anchor_rank;

    bool operator<(const CandidateKey& other) const {
        if (objective != other.objective) return objective < other.objective;
        if (sigma != other.sigma) return sigma < other.sigma;
        if (stretch_dist != other.stretch_dist) return stretch_dist < other.stretch_dist;
        if (stretch != other.stretch) return stretch < other.stretch;
        return anchor_rank < other.anchor_rank;
    }
};

Eigen::VectorXd truncate_weights(const Eigen::VectorXd& weights, double floor) {
    Eigen::VectorXd kept = (weights.array() < floor).select(0.0, weights);
    const double total = kept.sum();
    if (total <= 0.0) return weights;  // floor swallowed everything; keep the exact weights
    return kept / total;
}

RegularTrack stretch_about(const RegularTrack& base, double stretch, Anchor anchor) {
    if (stretch == 1.0) return base;
    RegularTrack out = base;
    const GeoPoint a = (anchor == Anchor::origination) ? base.points.front() : base.points.back();
    for (auto& pt : out.points) {
        pt.lon = a.lon + stretch * (pt.lon - a.lon);
        pt.lat = a.lat + stretch * (pt.lat - a.lat);
    }
    return out;
}

}  // namespace

PreimageResult preimage(const Eigen::VectorXd& zeta, const DiffusionModel& model,
                        const PreimageConfig& config) {
    return preimage(zeta, model, embed(model), config);
}

PreimageResult preimage(const Eigen::VectorXd& zeta, const DiffusionModel& model,
                        const Eigen::MatrixXd& embedding, const PreimageConfig& config) {
    const std::vector<double> sigmas =
        config.sigma_grid.empty() ? default_sigma_grid(embedding) : config.sigma_grid;
    const std::vector<double> stretches =
        config.stretch_grid.empty() ? default_stretch_grid() : config.stretch_grid;
    if (sigmas.empty() || stretches.empty())
        throw std::invalid_argument("preimage: empty search grid");
    for (double s : stretches)
        if (s < 0.75 || s > 1.5)
            throw std::invalid_argument("preimage: stretch grid outside [0.75, 1.5]");
    if (!config.anchor_origination && !config.anchor_lysis)
        throw std::invalid_argument("preimage: no anchor enabled");

    std::vector<Anchor> anchors;
    if (config.anchor_origination) anchors.push_back(Anchor::origination);
    if (config.anchor_lysis) anchors.push_back(Anchor::lysis);

    bool have_best = false;
    CandidateKey best_key{};
    PreimageResult best;

    for (double sigma : sigmas) {
        const Eigen::VectorXd weights =
            truncate_weights(preimage_weights(zeta, embedding, sigma), config.weight_floor);
        const RegularTrack base = combine_tracks(weights, model.tracks, 1.0, Anchor::origination);
        for (const Anchor anchor : anchors) {
            for (double stretch : stretches) {
                RegularTrack candidate = stretch_about(base, stretch, anchor);
                const Eigen::VectorXd extended = nystrom_extend(model, candidate);
                const double objective = (zeta - extended).squaredNorm();
                const CandidateKey key{objective, sigma, std::abs(stretch - 1.0), stretch,
                                       anchor == Anchor::origination ? 0 : 1};
                if (!have_best || key < best_key) {
                    have_best = true;
                    best_key = key;
                    best = PreimageResult{std::move(candidate), weights, sigma, stretch, anchor,
                                          objective};
                }
            }
        }
    }
    return best;
}

std::vector<PreimageResult> preimage_batch(const Eigen::MatrixXd& zetas,
                                           const DiffusionModel& model,
                                           const PreimageConfig& config) {
    const Eigen::MatrixXd embedding = embed(model);
    PreimageConfig resolved = config;
    if (resolved.sigma_grid.empty()) resolved.sigma_grid = default_sigma_grid(embedding);
    if (resolved.stretch_grid.empty()) resolved.stretch_grid = default_stretch_grid();

    std::vector<PreimageResult> results(static_cast<std::size_t>(zetas.rows()));
    std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < zetas.rows(); ++i) {
        try {
            results[static_cast<std::size_t>(i)] =
                preimage(zetas.row(i).transpose(), model, embedding, resolved);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace trackdens
