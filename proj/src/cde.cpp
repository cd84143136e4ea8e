#include "trackdens/cde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "trackdens/csv.hpp"
#include "trackdens/error.hpp"
#include "trackdens/track_io.hpp"

namespace trackdens {

ConditionSplit split_by_condition(const TrackSet& tracks, const std::map<int, double>& condition,
                                  std::size_t count) {
    if (count < 1) throw std::invalid_argument("split_by_condition: count must be >= 1");
    if (tracks.years.size() != tracks.size())
        throw input_error("split_by_condition: track set has no year metadata");
    for (std::size_t i = 0; i < tracks.size(); ++i)
        if (condition.find(tracks.years[i]) == condition.end())
            throw input_error("split_by_condition: no condition value for year " +
                              std::to_string(tracks.years[i]) + " (track '" +
                              tracks.tracks[i].id + "')");

    std::vector<std::pair<int, double>> years(condition.begin(), condition.end());
    if (years.size() < 2 * count)
        throw input_error("split_by_condition: " + std::to_string(years.size()) +
                          " distinct years cannot support two groups of " + std::to_string(count));

    ConditionSplit split;
    // Hottest: largest value first; boundary ties resolved toward the
    // earlier year on both ends.
    std::sort(years.begin(), years.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
    for (std::size_t i = 0; i < count; ++i) split.hot_years.push_back(years[i].first);
    std::sort(years.begin(), years.end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first < b.first);
    });
    for (std::size_t i = 0; i < count; ++i) split.cold_years.push_back(years[i].first);
    std::sort(split.hot_years.begin(), split.hot_years.end());
    std::sort(split.cold_years.begin(), split.cold_years.end());

    const std::set<int> hot(split.hot_years.begin(), split.hot_years.end());
    const std::set<int> cold(split.cold_years.begin(), split.cold_years.end());
    for (int y : split.hot_years)
        if (cold.count(y))
            throw input_error("split_by_condition: year " + std::to_string(y) +
                              " falls in both groups (too many tied values)");

    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (hot.count(tracks.years[i])) split.hot_tracks.push_back(i);
        else if (cold.count(tracks.years[i])) split.cold_tracks.push_back(i);
    }
    return split;
}

ConditionalDensities conditional_densities(const TrackSet& tracks, const ConditionSplit& split,
                                           double epsilon, int t, int m, int k,
                                           const MetricConfig& metric) {
    if (split.hot_tracks.empty() || split.cold_tracks.empty())
        throw input_error("conditional_densities: empty partition");

    ConditionalDensities out;
    out.model = build_model(tracks, epsilon, t, m, metric);
    out.model_hash = track_set_hash(tracks);
    out.embedding = embed(out.model);

    const auto subset_fit = [&](const std::vector<std::size_t>& idx,
                                std::vector<std::string>& ids) {
        Eigen::MatrixXd pts(static_cast<Eigen::Index>(idx.size()), m);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            pts.row(static_cast<Eigen::Index>(r)) =
                out.embedding.row(static_cast<Eigen::Index>(idx[r]));
            ids.push_back(tracks.tracks[idx[r]].id);
        }
        const int kk = k > 0 ? k : default_density_k(idx.size());
        if (idx.size() < static_cast<std::size_t>(kk) + 1)
            throw input_error("conditional_densities: partition of " + std::to_string(idx.size()) +
                              " tracks is smaller than k+1 = " + std::to_string(kk + 1));
        return fit_knn_kde(pts, kk);
    };
    out.hot = subset_fit(split.hot_tracks, out.hot_ids);
    out.cold = subset_fit(split.cold_tracks, out.cold_ids);
    return out;
}

namespace {

double missing_or_value(std::string_view field, std::size_t line_no) {
    field = trim(field);
    if (field == "NA" || field == "na" || field == "nan" || field == "NaN")
        return std::numeric_limits<double>::quiet_NaN();
    return parse_double_field(field, line_no);
}

std::size_t grid_index(const std::vector<double>& axis, double value, const char* name) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), value - 1e-9);
    if (it == axis.end() || std::abs(*it - value) > 1e-9)
        throw input_error(std::string("sst grid: ") + name + " " + format_double(value) +
                          " is not a grid coordinate");
    return static_cast<std::size_t>(it - axis.begin());
}

/// Index of the cell [axis[i], axis[i+1]] containing v; throws outside.
std::size_t cell_index(const std::vector<double>& axis, double v, const char* name) {
    if (axis.size() < 2 || v < axis.front() || v > axis.back())
        throw input_error(std::string("sst_over_track: ") + name + " " + format_double(v) +
                          " outside the field extent [" + format_double(axis.front()) + ", " +
                          format_double(axis.back()) + "]");
    auto hi = std::upper_bound(axis.begin(), axis.end(), v);
    if (hi == axis.end()) --hi;           // v == axis.back()
    const std::size_t i = static_cast<std::size_t>(hi - axis.begin());
    return i == 0 ? 0 : i - 1;
}

}  // namespace

SSTField read_sst_csv(std::istream& in) {
    struct Cell { double time, lon, lat, value; };
    std::vector<Cell> cells;
    std::set<double> times, lons, lats;

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(sv);
        if (fields.size() < 4) throw parse_error("expected `time,lon,lat,value`", line_no);
        Cell c{parse_double_field(fields[0], line_no), parse_double_field(fields[1], line_no),
               parse_double_field(fields[2], line_no), missing_or_value(fields[3], line_no)};
        cells.push_back(c);
        times.insert(c.time);
        lons.insert(c.lon);
        lats.insert(c.lat);
    }
    if (cells.empty()) throw input_error("sst grid: no records");

    SSTField field;
    field.times.assign(times.begin(), times.end());
    field.lons.assign(lons.begin(), lons.end());
    field.lats.assign(lats.begin(), lats.end());
    field.values.assign(field.times.size() * field.lats.size() * field.lons.size(),
                        std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> seen(field.values.size(), false);
    for (const Cell& c : cells) {
        const std::size_t ti = grid_index(field.times, c.time, "time");
        const std::size_t lati = grid_index(field.lats, c.lat, "lat");
        const std::size_t loni = grid_index(field.lons, c.lon, "lon");
        const std::size_t flat = (ti * field.lats.size() + lati) * field.lons.size() + loni;
        field.values[flat] = c.value;
        seen[flat] = true;
    }
    for (bool s : seen)
        if (!s) throw input_error("sst grid: incomplete (missing grid cells)");
    return field;
}

SSTField read_sst_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open sst file: " + path);
    return read_sst_csv(in);
}

double sst_sample(const SSTField& field, double lon, double lat, double time) {
    const std::size_t ti = grid_index(field.times, time, "time");
    const std::size_t la = cell_index(field.lats, lat, "lat");
    const std::size_t lo = cell_index(field.lons, lon, "lon");
    const double fx = (lon - field.lons[lo]) / (field.lons[lo + 1] - field.lons[lo]);
    const double fy = (lat - field.lats[la]) / (field.lats[la + 1] - field.lats[la]);
    const double v00 = field.at(ti, la, lo);
    const double v01 = field.at(ti, la, lo + 1);
    const double v10 = field.at(ti, la + 1, lo);
    const double v11 = field.at(ti, la + 1, lo + 1);
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
}

double sst_over_track(const SSTField& field, const RegularTrack& track, double time) {
    double acc = 0.0;
    for (const auto& pt : track.points) acc += sst_sample(field, pt.lon, pt.lat, time);
    return acc / static_cast<double>(track.points.size());
}

std::map<int, double> read_condition_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open condition file: " + path);
    std::map<int, double> condition;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(sv);
        if (fields.size() < 2) throw parse_error("expected `year,value`", line_no);
        condition[static_cast<int>(parse_int_field(fields[0], line_no))] =
            parse_double_field(fields[1], line_no);
    }
    return condition;
}

}  // namespace trackdens
