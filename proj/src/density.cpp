#include "trackdens/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "trackdens/error.hpp"
#include "trackdens/kernels.hpp"
#include "trackdens/rng.hpp"

namespace trackdens {

int default_density_k(std::size_t n) {
    return std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)))));
}

DensityEstimate fit_knn_kde(const Eigen::MatrixXd& points, int k) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw std::invalid_argument("fit_knn_kde: k must be >= 1");
    if (n < k + 1)
        throw std::invalid_argument("fit_knn_kde: need at least k+1 points, got " +
                                    std::to_string(n));
    if (!points.allFinite()) throw numeric_error("fit_knn_kde: non-finite point");

    const Eigen::MatrixXd sq = pairwise_sq_distances(points);
    DensityEstimate est;
    est.points = points;
    est.k = k;
    est.bandwidths.resize(n);

    std::vector<double> row(static_cast<std::size_t>(n) - 1);
    std::string zero_points;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) row[w++] = sq(i, j);
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        const double h = std::sqrt(row[static_cast<std::size_t>(k - 1)]);
        if (!(h > 0.0)) {
            if (!zero_points.empty()) zero_points += ", ";
            zero_points += std::to_string(i);
        }
        est.bandwidths(i) = h;
    }
    if (!zero_points.empty())
        throw numeric_error("fit_knn_kde: zero bandwidth (k+1 coincident points) at indices " +
                            zero_points);
    return est;
}

double kde_evaluate(const DensityEstimate& estimate, const Eigen::VectorXd& z) {
    if (z.size() != estimate.points.cols())
        throw std::invalid_argument("kde_evaluate: query dimension mismatch");
    return gaussian_mixture_batch_serial(estimate.points, estimate.bandwidths, z.transpose())(0);
}

Eigen::VectorXd kde_evaluate_batch(const DensityEstimate& estimate, const Eigen::MatrixXd& queries) {
    return gaussian_mixture_batch(estimate.points, estimate.bandwidths, queries);
}

Eigen::MatrixXd kde_sample(const DensityEstimate& estimate, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("kde_sample: count must be >= 1");
    const std::size_t n = estimate.n();
    const int m = estimate.m();
    Eigen::MatrixXd draws(static_cast<Eigen::Index>(count), m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(count); ++d) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(d)));
        const auto i = static_cast<Eigen::Index>(rng.index(n));
        const double h = estimate.bandwidths(i);
        for (int c = 0; c < m; ++c)
            draws(d, c) = estimate.points(i, c) + h * rng.normal();
    }
    return draws;
}

}  // namespace trackdens
