#include <cmath>
#include <limits>
#include <stdexcept>

#include "trackdens/diffusion.hpp"
#include "trackdens/kernels.hpp"
#include "trackdens/preimage.hpp"
#include "trackdens/stats.hpp"

namespace trackdens {

std::vector<CvCandidate> default_cv_grid(const TrackSet& tracks, const MetricConfig& metric) {
    const Eigen::MatrixXd dist = pairwise_track_distances(tracks.tracks, metric);
    std::vector<double> sq;
    sq.reserve(tracks.size() * (tracks.size() - 1) / 2);
    for (Eigen::Index i = 0; i < dist.rows(); ++i)
        for (Eigen::Index j = i + 1; j < dist.cols(); ++j) sq.push_back(dist(i, j) * dist(i, j));
    const double q10 = percentile(sq, 0.10);
    const double q90 = percentile(sq, 0.90);
    const double lo = q10 > 0.0 ? q10 : q90 * 1e-3;
    std::vector<CvCandidate> grid;
    for (double eps : log_spaced(lo, q90, 7))
        for (int t : {1, 2, 3}) grid.push_back(CvCandidate{eps, t});
    return grid;
}

namespace {

TrackSet drop_track(const TrackSet& tracks, std::size_t skip) {
    TrackSet subset;
    subset.tracks.reserve(tracks.size() - 1);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (i == skip) continue;
        subset.tracks.push_back(tracks.tracks[i]);
        if (!tracks.years.empty()) subset.years.push_back(tracks.years[i]);
    }
    return subset;
}

}  // namespace

CvResult cross_validate(const TrackSet& tracks, const std::vector<CvCandidate>& grid, int m,
                        const PreimageConfig& preimage_config, const MetricConfig& metric) {
    if (grid.empty()) throw std::invalid_argument("cross_validate: empty candidate grid");
    const std::size_t n = tracks.size();
    if (n < 10) throw std::invalid_argument("cross_validate: need at least 10 tracks");

    const auto total = static_cast<Eigen::Index>(grid.size() * n);

    std::vector<double> errors(static_cast<std::size_t>(total),
                               std::numeric_limits<double>::quiet_NaN());
    // One (candidate, held-out) cell per task: embarrassingly parallel, and
    // the reduction below runs in fixed index order so the result does not
    // depend on the worker count.
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index cell = 0; cell < total; ++cell) {
        const std::size_t c = static_cast<std::size_t>(cell) / n;
        const std::size_t i = static_cast<std::size_t>(cell) % n;
        try {
            const TrackSet subset = drop_track(tracks, i);
            const DiffusionModel model =
                build_model(subset, grid[c].epsilon, grid[c].t, m, metric);
            const Eigen::VectorXd zeta = nystrom_extend(model, tracks.tracks[i]);
            const PreimageResult inverted = preimage(zeta, model, preimage_config);
            errors[static_cast<std::size_t>(cell)] =
                track_distance(tracks.tracks[i], inverted.track, metric);
        } catch (const std::exception&) {
            // leave NaN: candidate becomes infeasible
        }
    }

    CvResult result;
    result.table.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        CvEntry& entry = result.table[c];
        entry.candidate = grid[c];
        entry.per_point_error.resize(n);
        entry.total_error = 0.0;
        entry.feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = errors[c * n + i];
            entry.per_point_error[i] = e;
            if (std::isnan(e))
                entry.feasible = false;
            else
                entry.total_error += e;
        }
        if (!entry.feasible) entry.total_error = std::numeric_limits<double>::infinity();
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < result.table.size(); ++c) {
        const CvEntry& a = result.table[c];
        const CvEntry& b = result.table[best];
        const bool better = a.total_error < b.total_error ||
                            (a.total_error == b.total_error &&
                             (a.candidate.epsilon < b.candidate.epsilon ||
                              (a.candidate.epsilon == b.candidate.epsilon &&
                               a.candidate.t < b.candidate.t)));
        if (better) best = c;
    }
    result.best = result.table[best].candidate;
    return result;
}

}  // namespace trackdens
