#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "trackdens/track.hpp"

namespace trackdens {

/// Fraction of the pooled 2n points whose nearest neighbor under the track
/// metric belongs to the same sample. Ties go to the smallest pooled index
/// (A's tracks come first). Depends only on the ordering the metric induces,
/// so any monotone increasing transform of the metric leaves it unchanged.
double nn_statistic(const std::vector<RegularTrack>& a, const std::vector<RegularTrack>& b,
                    const MetricConfig& metric = {});

struct NnDetail {
    double fraction = 0.0;
    std::vector<std::uint8_t> within;  // pooled order: all of A, then all of B
};

NnDetail nn_statistic_detailed(const std::vector<RegularTrack>& a,
                               const std::vector<RegularTrack>& b,
                               const MetricConfig& metric = {});

/// Same statistic under an arbitrary metric callable (used by property
/// tests and by the embedded-space self-checks).
NnDetail nn_statistic_custom(
    std::size_t n_a, std::size_t n_b,
    const std::function<double(std::size_t, std::size_t)>& pooled_metric);

/// Draws one simulated track set; the seed argument is a derived substream,
/// so replicate r is reproducible regardless of scheduling.
using TrackSampler = std::function<TrackSet(std::uint64_t seed)>;

struct PointFlag {
    std::string id;
    int sample = 0;  // 0 = observed, 1 = simulated
    bool within_nn = false;
};

struct ValidationReport {
    double ell_star = 0.0;
    std::vector<double> null_proportions;
    double p_value = 0.0;            // upper tail, (#{null >= ell*} + 1) / (k + 1)
    double p_value_lower = 0.0;      // lower tail, same convention
    double p_value_two_sided = 0.0;  // 2 * min(tails), capped at 1
    std::vector<PointFlag> flags;    // 2n entries, observed first
    std::size_t k = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// The simulated two-sample test: k replicate pairs drawn from the sampler
/// form the null distribution of the NN proportion; one final draw paired
/// with the observed set gives ell*.
ValidationReport simulated_test(const TrackSampler& sampler, const TrackSet& observed,
                                std::size_t k, std::uint64_t seed,
                                const MetricConfig& metric = {});

void write_report_json(std::ostream& out, const ValidationReport& report);

struct AssessmentTable {
    std::vector<std::string> ids;
    std::vector<int> sample;
    std::vector<std::uint8_t> within_nn;
    Eigen::MatrixXd coords;  // 2n x m
};

/// Builds the visual-assessment table `id,sample,within_nn,d1..dm` from a
/// report and the diffusion coordinates of both samples (observed first,
/// same order as the report flags). Throws input_error on id mismatch.
AssessmentTable visual_assessment(const ValidationReport& report,
                                  const std::vector<std::string>& observed_ids,
                                  const Eigen::MatrixXd& observed_coords,
                                  const std::vector<std::string>& simulated_ids,
                                  const Eigen::MatrixXd& simulated_coords);

void write_assessment_csv(std::ostream& out, const AssessmentTable& table);

/// Ids of rows whose leading coordinates fall inside the per-dimension
/// ranges (a discrepancy-region query; ranges may cover fewer dims than m).
std::vector<std::string> rows_in_region(const AssessmentTable& table,
                                        const std::vector<std::pair<double, double>>& ranges);

struct DimCandidate {
    int m = 0;
    bool feasible = true;
    double mean_ratio = 0.0;
    std::vector<double> ratios;
};

struct DimSelection {
    int selected_m = 0;
    std::vector<DimCandidate> table;
};

/// Dimension selection: for each candidate m the factory builds a sampler
/// from the full pipeline at that dimension; `sims` simulated sets are drawn
/// and their NN ratios against the observed set averaged. The m whose mean
/// ratio is closest to 0.5 wins; ties go to the smaller m. A factory or
/// sampler failure marks the candidate infeasible.
DimSelection select_dimension(const TrackSet& observed, const std::vector<int>& candidates,
                              std::size_t sims,
                              const std::function<TrackSampler(int m)>& sampler_factory,
                              std::uint64_t seed, const MetricConfig& metric = {});

}  // namespace trackdens
