#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "trackdens/diffusion.hpp"

namespace trackdens {

/// Orthonormal cosine basis on [a, b]:
///   phi_0 = 1/sqrt(b-a),  phi_i(z) = sqrt(2/(b-a)) cos(i pi (z-a)/(b-a)).
/// A zero-width support falls back to the unit interval centered on the
/// point, which keeps the degenerate-predictor case well defined.
struct CosineBasis {
    double a = 0.0;
    double b = 1.0;

    double width() const noexcept { return b - a; }
    double eval(int i, double z) const;
    bool contains(double z) const noexcept { return z >= a && z <= b; }
};

CosineBasis cosine_basis_for(const std::vector<double>& values);

struct MarginalSeries {
    CosineBasis basis;
    Eigen::VectorXd theta;  // coefficients 0..I

    double evaluate(double z) const;
};

/// theta_i = mean of phi_i over the sample. Values outside the basis
/// support are an error.
MarginalSeries fit_series_marginal(const std::vector<double>& values, const CosineBasis& basis,
                                   int cutoff);

/// 1-D Gaussian KDE with the Silverman rule-of-thumb bandwidth, floored so
/// the conditional estimator below never divides by (near) zero.
struct GaussianKde1d {
    std::vector<double> sample;
    double bandwidth = 1.0;
    double floor = 1e-6;

    double evaluate(double x) const;
};

GaussianKde1d silverman_kde(const std::vector<double>& values);

/// Truncated tensor-product conditional density estimate
///   f(y|x) = sum_{i<=I, j<=J} theta_ij phi_i(x) rho_j(y),
/// where phi is the predictor cosine basis and rho is a response basis
/// supplied through its values at the sample points (rho_j(y_k)).
struct SeriesEstimate {
    CosineBasis predictor;
    Eigen::MatrixXd theta;  // (I+1) x (J+1)

    /// rho_y holds the response-basis values at the evaluation point y.
    double evaluate(double x, const Eigen::VectorXd& rho_y) const;
};

/// theta_ij = (1/n) sum_k phi_i(x_k) rho_j(y_k) / fx(x_k).
/// fx values below 1e-6 are an error naming the offending samples.
SeriesEstimate fit_series_conditional(const std::vector<double>& x,
                                      const Eigen::MatrixXd& response_values,  // n x (J+1)
                                      const CosineBasis& predictor, int cutoff_predictor,
                                      const std::function<double(double)>& fx);

/// Response basis built from a diffusion model: rho_j is eigenvector psi_j
/// rescaled to unit empirical norm over the training set (the sampled
/// eigenvectors are only orthonormal up to sampling). rho_0 is constant 1.
struct DiffusionResponseBasis {
    const DiffusionModel* model = nullptr;
    int cutoff = 0;             // J
    Eigen::VectorXd scales;     // per-eigenvector normalization

    /// n x (J+1) values at the training tracks.
    Eigen::MatrixXd training_values() const;
    /// Values at an arbitrary track via the Nystrom extension.
    Eigen::VectorXd values_at(const RegularTrack& y) const;
};

DiffusionResponseBasis diffusion_response_basis(const DiffusionModel& model, int cutoff);

/// Convenience overload: pairs are (x_k, training track k of the model).
SeriesEstimate fit_series_conditional(const std::vector<double>& x,
                                      const DiffusionResponseBasis& response,
                                      const CosineBasis& predictor, int cutoff_predictor,
                                      const std::function<double(double)>& fx);

}  // namespace trackdens
