#include "trackdens/track.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "trackdens/error.hpp"

namespace trackdens {

void validate_track_set(const TrackSet& set) {
    if (!set.years.empty() && set.years.size() != set.tracks.size())
        throw input_error("track set: years not aligned with tracks");
    std::set<std::string> ids;
    const std::size_t p = set.p();
    for (const auto& t : set.tracks) {
        if (t.p() != p)
            throw input_error("track set: track '" + t.id + "' has p=" +
                              std::to_string(t.p()) + ", expected " + std::to_string(p));
        if (!ids.insert(t.id).second)
            throw input_error("track set: duplicate id '" + t.id + "'");
    }
}

double track_distance(const RegularTrack& a, const RegularTrack& b, const MetricConfig& metric) {
    if (a.p() != b.p())
        throw std::invalid_argument("track_distance: mismatched p (" + std::to_string(a.p()) +
                                    " vs " + std::to_string(b.p()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        double dlon = a.points[i].lon - b.points[i].lon;
        const double dlat = a.points[i].lat - b.points[i].lat;
        if (metric.cos_lat_scaling) {
            const double mean_lat = 0.5 * (a.points[i].lat + b.points[i].lat);
            dlon *= std::cos(mean_lat * 0.017453292519943295);
        }
        sum += std::sqrt(dlon * dlon + dlat * dlat);
    }
    return sum;
}

namespace {

double segment_length(const GeoPoint& a, const GeoPoint& b) {
    const double dlon = b.lon - a.lon;
    const double dlat = b.lat - a.lat;
    return std::sqrt(dlon * dlon + dlat * dlat);
}

}  // namespace

RegularTrack regularize(const RawTrack& raw, std::size_t p) {
    if (raw.points.size() < 2)
        throw input_error("regularize: track '" + raw.id + "' has fewer than 2 points");
    if (p < 2)
        throw std::invalid_argument("regularize: p must be at least 2");

    // Cumulative arc length along the piecewise-linear path.
    const std::size_t k = raw.points.size();
    std::vector<double> cum(k, 0.0);
    for (std::size_t i = 1; i < k; ++i)
        cum[i] = cum[i - 1] + segment_length(raw.points[i - 1], raw.points[i]);
    const double total = cum.back();
    if (!(total > 0.0))
        throw numeric_error("regularize: track '" + raw.id + "' has zero path length");

    RegularTrack out;
    out.id = raw.id;
    out.points.resize(p);
    out.points.front() = raw.points.front();
    out.points.back() = raw.points.back();

    std::size_t seg = 0;
    for (std::size_t i = 1; i + 1 < p; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(p - 1);
        while (seg + 2 < k && cum[seg + 1] < target) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double frac = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
        out.points[i].lon = raw.points[seg].lon + frac * (raw.points[seg + 1].lon - raw.points[seg].lon);
        out.points[i].lat = raw.points[seg].lat + frac * (raw.points[seg + 1].lat - raw.points[seg].lat);
    }
    return out;
}

}  // namespace trackdens
