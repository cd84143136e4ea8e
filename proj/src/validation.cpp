#include "trackdens/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "trackdens/csv.hpp"
#include "trackdens/error.hpp"
#include "trackdens/kernels.hpp"
#include "trackdens/rng.hpp"
#include "trackdens/stats.hpp"

namespace trackdens {

namespace {

NnDetail nn_from_matrix(const Eigen::MatrixXd& pooled, std::size_t n_a) {
    if (!pooled.allFinite()) throw numeric_error("nn_statistic: metric returned non-finite value");
    const NnOutcome outcome = nn_within_sample(pooled, n_a);
    return NnDetail{outcome.fraction, outcome.within};
}

Eigen::MatrixXd pooled_matrix(const std::vector<RegularTrack>& a,
                              const std::vector<RegularTrack>& b, const MetricConfig& metric) {
    std::vector<RegularTrack> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    return pairwise_track_distances(pooled, metric);
}

void check_two_samples(std::size_t n_a, std::size_t n_b) {
    if (n_a != n_b) throw std::invalid_argument("nn_statistic: samples must have equal size");
    if (n_a < 2) throw std::invalid_argument("nn_statistic: need n >= 2");
}

}  // namespace

double nn_statistic(const std::vector<RegularTrack>& a, const std::vector<RegularTrack>& b,
                    const MetricConfig& metric) {
    return nn_statistic_detailed(a, b, metric).fraction;
}

NnDetail nn_statistic_detailed(const std::vector<RegularTrack>& a,
                               const std::vector<RegularTrack>& b, const MetricConfig& metric) {
    check_two_samples(a.size(), b.size());
    return nn_from_matrix(pooled_matrix(a, b, metric), a.size());
}

NnDetail nn_statistic_custom(
    std::size_t n_a, std::size_t n_b,
    const std::function<double(std::size_t, std::size_t)>& pooled_metric) {
    check_two_samples(n_a, n_b);
    const auto total = static_cast<Eigen::Index>(n_a + n_b);
    Eigen::MatrixXd pooled(total, total);
    for (Eigen::Index i = 0; i < total; ++i) {
        pooled(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < total; ++j) {
            const double d = pooled_metric(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            pooled(i, j) = d;
            pooled(j, i) = d;
        }
    }
    return nn_from_matrix(pooled, n_a);
}

ValidationReport simulated_test(const TrackSampler& sampler, const TrackSet& observed,
                                std::size_t k, std::uint64_t seed, const MetricConfig& metric) {
    if (k < 1) throw std::invalid_argument("simulated_test: k must be >= 1");
    const std::size_t n = observed.size();

    ValidationReport report;
    report.k = k;
    report.n = n;
    report.seed = seed;
    report.null_proportions.assign(k, std::numeric_limits<double>::quiet_NaN());

    std::vector<std::string> failure;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(k); ++r) {
        try {
            const TrackSet first = sampler(mix_seed(seed, 2 * static_cast<std::uint64_t>(r)));
            const TrackSet second = sampler(mix_seed(seed, 2 * static_cast<std::uint64_t>(r) + 1));
            report.null_proportions[static_cast<std::size_t>(r)] =
                nn_statistic(first.tracks, second.tracks, metric);
        } catch (const std::exception& e) {
#pragma omp critical
            failure.push_back("replicate " + std::to_string(r) + ": " + e.what());
        }
    }
    if (!failure.empty()) throw numeric_error("simulated_test: sampler failed at " + failure.front());

    const TrackSet final_draw = sampler(mix_seed(seed, 2 * static_cast<std::uint64_t>(k)));
    if (final_draw.size() != n)
        throw numeric_error("simulated_test: sampler produced " + std::to_string(final_draw.size()) +
                            " tracks, observed set has " + std::to_string(n));
    const NnDetail detail = nn_statistic_detailed(observed.tracks, final_draw.tracks, metric);
    report.ell_star = detail.fraction;

    report.flags.resize(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        report.flags[i].sample = i < n ? 0 : 1;
        report.flags[i].id =
            i < n ? observed.tracks[i].id : final_draw.tracks[i - n].id;
        report.flags[i].within_nn = detail.within[i] != 0;
    }

    std::size_t above = 0;
    std::size_t below = 0;
    for (double v : report.null_proportions) {
        if (v >= report.ell_star) ++above;
        if (v <= report.ell_star) ++below;
    }
    const double denom = static_cast<double>(k) + 1.0;
    report.p_value = (static_cast<double>(above) + 1.0) / denom;
    report.p_value_lower = (static_cast<double>(below) + 1.0) / denom;
    report.p_value_two_sided = std::min(1.0, 2.0 * std::min(report.p_value, report.p_value_lower));
    return report;
}

void write_report_json(std::ostream& out, const ValidationReport& report) {
    nlohmann::json null_summary;
    {
        std::vector<double> sorted = report.null_proportions;
        std::sort(sorted.begin(), sorted.end());
        null_summary = {{"min", sorted.front()},
                        {"q25", percentile(sorted, 0.25)},
                        {"median", percentile(sorted, 0.5)},
                        {"q75", percentile(sorted, 0.75)},
                        {"max", sorted.back()}};
    }
    const nlohmann::json doc = {{"ell_star", report.ell_star},
                                {"k", report.k},
                                {"n", report.n},
                                {"p_value", report.p_value},
                                {"p_value_lower", report.p_value_lower},
                                {"p_value_two_sided", report.p_value_two_sided},
                                {"null_summary", null_summary},
                                {"seed", report.seed}};
    out << doc.dump(2) << '\n';
}

AssessmentTable visual_assessment(const ValidationReport& report,
                                  const std::vector<std::string>& observed_ids,
                                  const Eigen::MatrixXd& observed_coords,
                                  const std::vector<std::string>& simulated_ids,
                                  const Eigen::MatrixXd& simulated_coords) {
    const std::size_t n = report.n;
    if (observed_ids.size() != n || simulated_ids.size() != n ||
        observed_coords.rows() != static_cast<Eigen::Index>(n) ||
        simulated_coords.rows() != static_cast<Eigen::Index>(n) ||
        observed_coords.cols() != simulated_coords.cols())
        throw input_error("visual_assessment: embeddings not aligned with the report");

    AssessmentTable table;
    table.coords.resize(static_cast<Eigen::Index>(2 * n), observed_coords.cols());
    table.ids.resize(2 * n);
    table.sample.resize(2 * n);
    table.within_nn.resize(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const bool obs = i < n;
        const std::string& id = obs ? observed_ids[i] : simulated_ids[i - n];
        if (report.flags[i].id != id)
            throw input_error("visual_assessment: id mismatch at pooled row " + std::to_string(i) +
                              " ('" + report.flags[i].id + "' vs '" + id + "')");
        table.ids[i] = id;
        table.sample[i] = report.flags[i].sample;
        table.within_nn[i] = report.flags[i].within_nn ? 1 : 0;
        table.coords.row(static_cast<Eigen::Index>(i)) =
            obs ? observed_coords.row(static_cast<Eigen::Index>(i))
                : simulated_coords.row(static_cast<Eigen::Index>(i - n));
    }
    return table;
}

void write_assessment_csv(std::ostream& out, const AssessmentTable& table) {
    out << "id,sample,within_nn";
    for (Eigen::Index c = 0; c < table.coords.cols(); ++c) out << ",d" << (c + 1);
    out << '\n';
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        out << table.ids[i] << ',' << table.sample[i] << ',' << int(table.within_nn[i]);
        for (Eigen::Index c = 0; c < table.coords.cols(); ++c)
            out << ',' << format_double(table.coords(static_cast<Eigen::Index>(i), c));
        out << '\n';
    }
}

std::vector<std::string> rows_in_region(const AssessmentTable& table,
                                        const std::vector<std::pair<double, double>>& ranges) {
    if (static_cast<Eigen::Index>(ranges.size()) > table.coords.cols())
        throw std::invalid_argument("rows_in_region: more ranges than coordinates");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        bool inside = true;
        for (std::size_t r = 0; r < ranges.size(); ++r) {
            const double v = table.coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r));
            if (v < ranges[r].first || v > ranges[r].second) {
                inside = false;
                break;
            }
        }
        if (inside) ids.push_back(table.ids[i]);
    }
    return ids;
}

DimSelection select_dimension(const TrackSet& observed, const std::vector<int>& candidates,
                              std::size_t sims,
                              const std::function<TrackSampler(int m)>& sampler_factory,
                              std::uint64_t seed, const MetricConfig& metric) {
    if (candidates.empty()) throw std::invalid_argument("select_dimension: no candidates");
    if (sims < 1) throw std::invalid_argument("select_dimension: sims must be >= 1");

    DimSelection selection;
    selection.table.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        DimCandidate& entry = selection.table[c];
        entry.m = candidates[c];
        try {
            const TrackSampler sampler = sampler_factory(candidates[c]);
            entry.ratios.assign(sims, std::numeric_limits<double>::quiet_NaN());
            bool failed = false;
#pragma omp parallel for schedule(dynamic)
            for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(sims); ++s) {
                try {
                    const TrackSet sim = sampler(
                        mix_seed(seed, (static_cast<std::uint64_t>(c) << 32) ^
                                           static_cast<std::uint64_t>(s)));
                    entry.ratios[static_cast<std::size_t>(s)] =
                        nn_statistic(observed.tracks, sim.tracks, metric);
                } catch (const std::exception&) {
#pragma omp critical
                    failed = true;
                }
            }
            if (failed) throw numeric_error("sampler failed");
            entry.mean_ratio = 0.0;
            for (double r : entry.ratios) entry.mean_ratio += r;
            entry.mean_ratio /= static_cast<double>(sims);
            entry.feasible = true;
        } catch (const std::exception&) {
            entry.feasible = false;
            entry.mean_ratio = std::numeric_limits<double>::quiet_NaN();
        }
    }

    bool have = false;
    std::size_t best = 0;
    for (std::size_t c = 0; c < selection.table.size(); ++c) {
        if (!selection.table[c].feasible) continue;
        if (!have) {
            have = true;
            best = c;
            continue;
        }
        const double da = std::abs(selection.table[c].mean_ratio - 0.5);
        const double db = std::abs(selection.table[best].mean_ratio - 0.5);
        if (da < db || (da == db && selection.table[c].m < selection.table[best].m)) best = c;
    }
    if (!have) throw numeric_error("select_dimension: every candidate infeasible");
    selection.selected_m = selection.table[best].m;
    return selection;
}

}  // namespace trackdens
