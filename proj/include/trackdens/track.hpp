#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace trackdens {

struct GeoPoint {
    double lon = 0.0;  // degrees
    double lat = 0.0;  // degrees
};

/// A storm fix sequence as observed: variable length, optional timestamps in
/// 6-hour increments.
struct RawTrack {
    std::string id;
    std::vector<GeoPoint> points;
    std::vector<double> timestamps;  // empty when the source has none
};

/// A track resampled to exactly p points equally spaced by arc length along
/// the raw polyline. Endpoints coincide with the raw genesis/lysis fixes.
struct RegularTrack {
    std::string id;
    std::vector<GeoPoint> points;

    std::size_t p() const noexcept { return points.size(); }
};

/// The data set: n regularized tracks sharing one p, with per-track years
/// available for conditioning. Immutable after construction in practice;
/// safe to share across parallel workers.
struct TrackSet {
    std::vector<RegularTrack> tracks;
    std::vector<int> years;  // aligned with tracks; empty when unknown

    std::size_t size() const noexcept { return tracks.size(); }
    std::size_t p() const noexcept { return tracks.empty() ? 0 : tracks.front().p(); }
};

/// Validates shared p, unique ids, year alignment. Throws input_error.
void validate_track_set(const TrackSet& set);

struct MetricConfig {
    /// Scale longitude differences by cos(mean latitude of the two points).
    /// Off by default: the reference analysis treats coordinates as plain
    /// planar degrees (an epsilon of 430 is a squared-degree scale).
    bool cos_lat_scaling = false;
};

/// Sum over corresponding points of the Euclidean point distance, in degrees.
/// Throws std::invalid_argument when the tracks have different p.
double track_distance(const RegularTrack& a, const RegularTrack& b,
                      const MetricConfig& metric = {});

/// Resample to p points equally spaced by arc length; linear interpolation
/// between raw fixes; first and last raw points preserved exactly.
/// Throws numeric_error when the raw path has zero length.
RegularTrack regularize(const RawTrack& raw, std::size_t p = 13);

}  // namespace trackdens
