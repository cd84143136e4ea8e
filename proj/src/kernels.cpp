#include "trackdens/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace trackdens {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

inline double mixture_at(const Eigen::MatrixXd& points, const Eigen::VectorXd& bandwidths,
                         const Eigen::MatrixXd& queries, Eigen::Index q) {
    const Eigen::Index n = points.rows();
    const Eigen::Index m = points.cols();
    const double norm = std::pow(two_pi, -0.5 * static_cast<double>(m));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (Eigen::Index c = 0; c < m; ++c) {
            const double diff = queries(q, c) - points(i, c);
            d2 += diff * diff;
        }
        const double h = bandwidths(i);
        acc += std::pow(h, -static_cast<double>(m)) * norm * std::exp(-0.5 * d2 / (h * h));
    }
    return acc / static_cast<double>(n);
}

inline void nn_row(const Eigen::MatrixXd& pooled, std::size_t n_a, Eigen::Index i,
                   NnOutcome& out) {
    const Eigen::Index total = pooled.rows();
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_j = -1;
    for (Eigen::Index j = 0; j < total; ++j) {
        if (j == i) continue;
        const double d = pooled(i, j);
        if (d < best) {  // strict: first minimum keeps the smallest pooled index
            best = d;
            best_j = j;
        }
    }
    const bool label_i = static_cast<std::size_t>(i) < n_a;
    const bool label_j = static_cast<std::size_t>(best_j) < n_a;
    out.within[static_cast<std::size_t>(i)] = (label_i == label_j) ? 1 : 0;
    out.nn_index[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best_j);
}

}  // namespace

Eigen::MatrixXd pairwise_track_distances_serial(const std::vector<RegularTrack>& tracks,
                                                const MetricConfig& metric) {
    const auto n = static_cast<Eigen::Index>(tracks.size());
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = track_distance(tracks[static_cast<std::size_t>(i)],
                                            tracks[static_cast<std::size_t>(j)], metric);
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

Eigen::MatrixXd pairwise_track_distances(const std::vector<RegularTrack>& tracks,
                                         const MetricConfig& metric) {
    const auto n = static_cast<Eigen::Index>(tracks.size());
    Eigen::MatrixXd dist(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = track_distance(tracks[static_cast<std::size_t>(i)],
                                            tracks[static_cast<std::size_t>(j)], metric);
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }
    return dist;
}

Eigen::MatrixXd cross_track_distances_serial(const std::vector<RegularTrack>& a,
                                             const std::vector<RegularTrack>& b,
                                             const MetricConfig& metric) {
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd dist(na, nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            dist(i, j) = track_distance(a[static_cast<std::size_t>(i)],
                                        b[static_cast<std::size_t>(j)], metric);
    return dist;
}

Eigen::MatrixXd cross_track_distances(const std::vector<RegularTrack>& a,
                                      const std::vector<RegularTrack>& b,
                                      const MetricConfig& metric) {
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd dist(na, nb);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            dist(i, j) = track_distance(a[static_cast<std::size_t>(i)],
                                        b[static_cast<std::size_t>(j)], metric);
    return dist;
}

Eigen::MatrixXd pairwise_sq_distances_serial(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (points.row(i) - points.row(j)).squaredNorm();
            dist(i, j) = d2;
            dist(j, i) = d2;
        }
    }
    return dist;
}

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd dist(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (points.row(i) - points.row(j)).squaredNorm();
            dist(i, j) = d2;
            dist(j, i) = d2;
        }
    }
    return dist;
}

Eigen::VectorXd gaussian_mixture_batch_serial(const Eigen::MatrixXd& points,
                                              const Eigen::VectorXd& bandwidths,
                                              const Eigen::MatrixXd& queries) {
    if (points.cols() != queries.cols())
        throw std::invalid_argument("gaussian_mixture_batch: dimension mismatch");
    Eigen::VectorXd out(queries.rows());
    for (Eigen::Index q = 0; q < queries.rows(); ++q)
        out(q) = mixture_at(points, bandwidths, queries, q);
    return out;
}

Eigen::VectorXd gaussian_mixture_batch(const Eigen::MatrixXd& points,
                                       const Eigen::VectorXd& bandwidths,
                                       const Eigen::MatrixXd& queries) {
    if (points.cols() != queries.cols())
        throw std::invalid_argument("gaussian_mixture_batch: dimension mismatch");
    Eigen::VectorXd out(queries.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index q = 0; q < queries.rows(); ++q)
        out(q) = mixture_at(points, bandwidths, queries, q);
    return out;
}

NnOutcome nn_within_sample_serial(const Eigen::MatrixXd& pooled, std::size_t n_a) {
    const Eigen::Index total = pooled.rows();
    NnOutcome out;
    out.within.resize(static_cast<std::size_t>(total));
    out.nn_index.resize(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) nn_row(pooled, n_a, i, out);
    std::size_t hits = 0;
    for (auto w : out.within) hits += w;
    out.fraction = static_cast<double>(hits) / static_cast<double>(total);
    return out;
}

NnOutcome nn_within_sample(const Eigen::MatrixXd& pooled, std::size_t n_a) {
    const Eigen::Index total = pooled.rows();
    NnOutcome out;
    out.within.resize(static_cast<std::size_t>(total));
    out.nn_index.resize(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < total; ++i) nn_row(pooled, n_a, i, out);
    std::size_t hits = 0;
    for (auto w : out.within) hits += w;
    out.fraction = static_cast<double>(hits) / static_cast<double>(total);
    return out;
}

}  // namespace trackdens
