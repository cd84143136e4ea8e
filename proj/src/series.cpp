#include "trackdens/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trackdens/error.hpp"
#include "trackdens/stats.hpp"

namespace trackdens {

namespace {
constexpr double pi = 3.141592653589793238462643383279;
}

double CosineBasis::eval(int i, double z) const {
    const double w = width();
    if (i == 0) return 1.0 / std::sqrt(w);
    return std::sqrt(2.0 / w) * std::cos(static_cast<double>(i) * pi * (z - a) / w);
}

CosineBasis cosine_basis_for(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("cosine_basis_for: empty sample");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    CosineBasis basis{*lo, *hi};
    if (!(basis.width() > 0.0)) {
        basis.a = *lo - 0.5;  // degenerate support: unit interval convention
        basis.b = *lo + 0.5;
    }
    return basis;
}

MarginalSeries fit_series_marginal(const std::vector<double>& values, const CosineBasis& basis,
                                   int cutoff) {
    if (values.empty()) throw std::invalid_argument("fit_series_marginal: empty sample");
    if (cutoff < 0) throw std::invalid_argument("fit_series_marginal: negative cutoff");
    for (double z : values)
        if (!basis.contains(z))
            throw input_error("fit_series_marginal: value " + std::to_string(z) +
                              " outside basis support");

    MarginalSeries series;
    series.basis = basis;
    series.theta = Eigen::VectorXd::Zero(cutoff + 1);
    for (double z : values)
        for (int i = 0; i <= cutoff; ++i) series.theta(i) += basis.eval(i, z);
    series.theta /= static_cast<double>(values.size());
    return series;
}

double MarginalSeries::evaluate(double z) const {
    double acc = 0.0;
    for (int i = 0; i < theta.size(); ++i) acc += theta(i) * basis.eval(i, z);
    return acc;
}

GaussianKde1d silverman_kde(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("silverman_kde: need at least 2 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    const double sd = std::sqrt(var);
    const double iqr = percentile(values, 0.75) - percentile(values, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = std::max(sd, 1e-3);
    GaussianKde1d kde;
    kde.sample = values;
    kde.bandwidth = std::max(0.9 * spread * std::pow(n, -0.2), 1e-12);
    return kde;
}

double GaussianKde1d::evaluate(double x) const {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
    double acc = 0.0;
    for (double s : sample) {
        const double u = (x - s) / bandwidth;
        acc += std::exp(-0.5 * u * u);
    }
    acc *= inv_sqrt_2pi / (bandwidth * static_cast<double>(sample.size()));
    return std::max(acc, floor);
}

SeriesEstimate fit_series_conditional(const std::vector<double>& x,
                                      const Eigen::MatrixXd& response_values,
                                      const CosineBasis& predictor, int cutoff_predictor,
                                      const std::function<double(double)>& fx) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("fit_series_conditional: empty sample");
    if (response_values.rows() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("fit_series_conditional: response rows != sample size");
    if (cutoff_predictor < 0) throw std::invalid_argument("fit_series_conditional: negative cutoff");

    std::string offenders;
    std::vector<double> inv_fx(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!predictor.contains(x[k]))
            throw input_error("fit_series_conditional: predictor value " + std::to_string(x[k]) +
                              " outside basis support");
        const double f = fx(x[k]);
        if (!(f >= 1e-6)) {
            if (!offenders.empty()) offenders += ", ";
            offenders += "x[" + std::to_string(k) + "]=" + std::to_string(x[k]);
        } else {
            inv_fx[k] = 1.0 / f;
        }
    }
    if (!offenders.empty())
        throw numeric_error("fit_series_conditional: marginal predictor density below 1e-6 at " +
                            offenders);

    SeriesEstimate est;
    est.predictor = predictor;
    est.theta = Eigen::MatrixXd::Zero(cutoff_predictor + 1, response_values.cols());
    for (std::size_t k = 0; k < n; ++k) {
        const double w = inv_fx[k];
        for (int i = 0; i <= cutoff_predictor; ++i) {
            const double phi = predictor.eval(i, x[k]) * w;
            for (Eigen::Index j = 0; j < response_values.cols(); ++j)
                est.theta(i, j) += phi * response_values(static_cast<Eigen::Index>(k), j);
        }
    }
    est.theta /= static_cast<double>(n);
    return est;
}

double SeriesEstimate::evaluate(double x, const Eigen::VectorXd& rho_y) const {
    if (rho_y.size() != theta.cols())
        throw std::invalid_argument("SeriesEstimate::evaluate: response value count mismatch");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        const double phi = predictor.eval(static_cast<int>(i), x);
        acc += phi * theta.row(i).dot(rho_y.transpose());
    }
    return acc;
}

DiffusionResponseBasis diffusion_response_basis(const DiffusionModel& model, int cutoff) {
    if (cutoff < 0 || static_cast<std::size_t>(cutoff) >= model.n())
        throw std::invalid_argument("diffusion_response_basis: bad cutoff");
    DiffusionResponseBasis basis;
    basis.model = &model;
    basis.cutoff = cutoff;
    basis.scales.resize(cutoff + 1);
    const double n = static_cast<double>(model.n());
    for (int j = 0; j <= cutoff; ++j) {
        const double norm2 = model.eigenvectors.col(j).squaredNorm() / n;
        basis.scales(j) = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
    }
    return basis;
}

Eigen::MatrixXd DiffusionResponseBasis::training_values() const {
    const auto n = static_cast<Eigen::Index>(model->n());
    Eigen::MatrixXd values(n, cutoff + 1);
    for (int j = 0; j <= cutoff; ++j)
        values.col(j) = scales(j) * model->eigenvectors.col(j);
    return values;
}

Eigen::VectorXd DiffusionResponseBasis::values_at(const RegularTrack& y) const {
    // psi_hat_j(y) = (1/lambda_j) sum_z p(y,z) psi_j(z), per the extension.
    const Eigen::VectorXd row = extend_transition_row(*model, y);
    Eigen::VectorXd values(cutoff + 1);
    for (int j = 0; j <= cutoff; ++j) {
        const double lam = model->eigenvalues(j);
        if (std::abs(lam) < 1e-12)
            throw numeric_error("diffusion response basis: eigenvalue " + std::to_string(j) +
                                " too small to extend");
        values(j) = scales(j) * row.dot(model->eigenvectors.col(j)) / lam;
    }
    return values;
}

SeriesEstimate fit_series_conditional(const std::vector<double>& x,
                                      const DiffusionResponseBasis& response,
                                      const CosineBasis& predictor, int cutoff_predictor,
                                      const std::function<double(double)>& fx) {
    return fit_series_conditional(x, response.training_values(), predictor, cutoff_predictor, fx);
}

}  // namespace trackdens
