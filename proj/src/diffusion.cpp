#include "trackdens/diffusion.hpp"

#include <Eigen/Dense>
#include <exception>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "trackdens/error.hpp"
#include "trackdens/kernels.hpp"

namespace trackdens {

namespace {

void check_model_invariants(const DiffusionModel& model) {
    const Eigen::Index n = model.transition.rows();
    const Eigen::VectorXd row_sums = model.transition.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(row_sums(i) - 1.0) > 1e-12)
            throw numeric_error("diffusion: transition row " + std::to_string(i) +
                                " sums to " + std::to_string(row_sums(i)));

    if (std::abs(model.eigenvalues(0) - 1.0) > 1e-10)
        throw numeric_error("diffusion: top eigenvalue deviates from 1");
    for (Eigen::Index j = 0; j < model.eigenvalues.size(); ++j)
        if (std::abs(model.eigenvalues(j)) > 1.0 + 1e-10)
            throw numeric_error("diffusion: eigenvalue " + std::to_string(j) +
                                " exceeds 1 in magnitude");

    for (int j = 0; j <= model.m; ++j) {
        const double residual =
            (model.transition * model.eigenvectors.col(j) -
             model.eigenvalues(j) * model.eigenvectors.col(j))
                .lpNorm<Eigen::Infinity>();
        if (residual > 1e-8)
            throw numeric_error("diffusion: eigenpair " + std::to_string(j) +
                                " residual " + std::to_string(residual));
    }

    if (model.stationary.minCoeff() < 0.0)
        throw numeric_error("diffusion: negative stationary mass");
    if (std::abs(model.stationary.sum() - 1.0) > 1e-10)
        throw numeric_error("diffusion: stationary distribution does not sum to 1");
    const double balance =
        (model.stationary.transpose() * model.transition - model.stationary.transpose())
            .lpNorm<Eigen::Infinity>();
    if (balance > 1e-8)
        throw numeric_error("diffusion: stationary distribution not invariant");
}

}  // namespace

DiffusionModel build_model(const TrackSet& tracks, double epsilon, int t, int m,
                           const MetricConfig& metric, std::vector<std::string>* warnings) {
    const std::size_t n = tracks.size();
    if (!(epsilon > 0.0)) throw std::invalid_argument("build_model: epsilon must be positive");
    if (t < 1) throw std::invalid_argument("build_model: t must be >= 1");
    if (m < 1 || static_cast<std::size_t>(m) > n - 1)
        throw std::invalid_argument("build_model: need 1 <= m <= n-1");
    if (n < static_cast<std::size_t>(m) + 2)
        throw std::invalid_argument("build_model: need n >= m + 2");

    DiffusionModel model;
    model.epsilon = epsilon;
    model.t = t;
    model.m = m;
    model.tracks = tracks;
    model.metric = metric;

    const Eigen::MatrixXd dist = pairwise_track_distances(tracks.tracks, metric);
    if (!dist.allFinite()) throw numeric_error("build_model: non-finite track distance");
    if (warnings) {
        for (Eigen::Index i = 0; i < dist.rows(); ++i)
            for (Eigen::Index j = i + 1; j < dist.cols(); ++j)
                if (dist(i, j) == 0.0) {
                    warnings->push_back("duplicate tracks '" +
                                        tracks.tracks[static_cast<std::size_t>(i)].id + "' and '" +
                                        tracks.tracks[static_cast<std::size_t>(j)].id +
                                        "': kernel is rank-deficient");
                }
    }

    model.kernel = (-dist.array().square() / epsilon).exp();
    const Eigen::VectorXd degree = model.kernel.rowwise().sum();
    model.transition = degree.cwiseInverse().asDiagonal() * model.kernel;
    model.stationary = degree / degree.sum();

    // Eigenpairs of the symmetric conjugate, converted to right eigenvectors
    // of P and scaled so psi_0 == 1 (L2(phi_0)-orthonormal).
    const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd sym =
        inv_sqrt.asDiagonal() * model.kernel * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw numeric_error("build_model: eigendecomposition failed");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd& raw_vals = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(raw_vals(a)) > std::abs(raw_vals(b));
    });

    const double scale = std::sqrt(degree.sum());
    model.eigenvalues.resize(static_cast<Eigen::Index>(n));
    model.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const Eigen::Index src = order[j];
        model.eigenvalues(static_cast<Eigen::Index>(j)) = raw_vals(src);
        Eigen::VectorXd psi = scale * (inv_sqrt.asDiagonal() * solver.eigenvectors().col(src));
        // Sign convention: the entry of largest magnitude is positive.
        Eigen::Index arg_max = 0;
        psi.cwiseAbs().maxCoeff(&arg_max);
        if (psi(arg_max) < 0.0) psi = -psi;
        model.eigenvectors.col(static_cast<Eigen::Index>(j)) = psi;
    }
    // The top eigenvalue of a strictly positive stochastic kernel is exactly
    // 1; clamp the numerical value so powers stay bounded.
    model.eigenvalues(0) = std::min(model.eigenvalues(0), 1.0);

    check_model_invariants(model);
    return model;
}

Eigen::MatrixXd embed(const DiffusionModel& model) {
    const auto n = static_cast<Eigen::Index>(model.n());
    Eigen::MatrixXd coords(n, model.m);
    for (int j = 1; j <= model.m; ++j) {
        const double factor = std::pow(model.eigenvalues(j), model.t);
        coords.col(j - 1) = factor * model.eigenvectors.col(j);
    }
    return coords;
}

double diffusion_distance_sq_exact(const DiffusionModel& model, std::size_t i, std::size_t j) {
    const auto n = static_cast<Eigen::Index>(model.n());
    if (i >= model.n() || j >= model.n())
        throw std::invalid_argument("diffusion_distance_sq_exact: index out of range");
    Eigen::RowVectorXd pi = model.transition.row(static_cast<Eigen::Index>(i));
    Eigen::RowVectorXd pj = model.transition.row(static_cast<Eigen::Index>(j));
    for (int step = 1; step < model.t; ++step) {
        pi = pi * model.transition;
        pj = pj * model.transition;
    }
    double acc = 0.0;
    for (Eigen::Index z = 0; z < n; ++z) {
        const double phi = model.stationary(z);
        if (!(phi > 0.0))
            throw numeric_error("diffusion distance: singular stationary mass at " +
                                std::to_string(z));
        const double diff = pi(z) - pj(z);
        acc += diff * diff / phi;
    }
    return acc;
}

double diffusion_distance_sq_spectral(const DiffusionModel& model, std::size_t i, std::size_t j,
                                      int terms) {
    if (terms < 0 || static_cast<std::size_t>(terms) > model.n() - 1)
        throw std::invalid_argument("diffusion_distance_sq_spectral: bad term count");
    double acc = 0.0;
    for (int r = 1; r <= terms; ++r) {
        const double lam = std::pow(model.eigenvalues(r), 2 * model.t);
        const double diff = model.eigenvectors(static_cast<Eigen::Index>(i), r) -
                            model.eigenvectors(static_cast<Eigen::Index>(j), r);
        acc += lam * diff * diff;
    }
    return acc;
}

Eigen::VectorXd extend_transition_row(const DiffusionModel& model, const RegularTrack& y) {
    if (y.p() != model.tracks.p())
        throw std::invalid_argument("extend_transition_row: track has wrong p");
    const auto n = static_cast<Eigen::Index>(model.n());
    Eigen::VectorXd row(n);
    for (Eigen::Index z = 0; z < n; ++z) {
        const double d = track_distance(y, model.tracks.tracks[static_cast<std::size_t>(z)],
                                        model.metric);
        row(z) = std::exp(-d * d / model.epsilon);
    }
    const double total = row.sum();
    if (!(total > 0.0))
        throw numeric_error("extend_transition_row: kernel row vanished (point too far)");
    return row / total;
}

Eigen::VectorXd nystrom_extend(const DiffusionModel& model, const RegularTrack& y) {
    for (int j = 1; j <= model.m; ++j)
        if (std::abs(model.eigenvalues(j)) < 1e-12)
            throw numeric_error("nystrom_extend: eigenvalue " + std::to_string(j) +
                                " below 1e-12; extension is ill-conditioned");
    const Eigen::VectorXd row = extend_transition_row(model, y);
    Eigen::VectorXd coords(model.m);
    for (int j = 1; j <= model.m; ++j) {
        const double projected = row.dot(model.eigenvectors.col(j));
        coords(j - 1) = std::pow(model.eigenvalues(j), model.t - 1) * projected;
    }
    return coords;
}

Eigen::MatrixXd nystrom_extend_batch(const DiffusionModel& model,
                                     const std::vector<RegularTrack>& ys) {
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(ys.size()), model.m);
    std::exception_ptr first_error;
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(ys.size()); ++i) {
        try {
            coords.row(i) = nystrom_extend(model, ys[static_cast<std::size_t>(i)]).transpose();
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return coords;
}

}  // namespace trackdens
