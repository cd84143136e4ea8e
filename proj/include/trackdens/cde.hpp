#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "trackdens/density.hpp"
#include "trackdens/diffusion.hpp"
#include "trackdens/track.hpp"

namespace trackdens {

/// Partition of the data by an annual condition variable (e.g. seasonal mean
/// SST): the `count` hottest and `count` coldest years.
struct ConditionSplit {
    std::vector<int> hot_years;
    std::vector<int> cold_years;
    std::vector<std::size_t> hot_tracks;   // indices into the TrackSet
    std::vector<std::size_t> cold_tracks;
};

/// Boundary ties are resolved toward the earlier year. Throws input_error
/// when a track's year is missing from the series or when there are fewer
/// than 2*count distinct years.
ConditionSplit split_by_condition(const TrackSet& tracks,
                                  const std::map<int, double>& condition,
                                  std::size_t count = 19);

struct ConditionalDensities {
    DiffusionModel model;      // shared map over all tracks: comparable coordinates
    std::string model_hash;    // content hash of the training set
    Eigen::MatrixXd embedding;
    DensityEstimate hot;
    DensityEstimate cold;
    std::vector<std::string> hot_ids;
    std::vector<std::string> cold_ids;
};

/// One diffusion map on the full set; separate kNN-KDE fits on the hot and
/// cold embedded subsets. k = 0 picks round(sqrt(subset size)) per side.
ConditionalDensities conditional_densities(const TrackSet& tracks, const ConditionSplit& split,
                                           double epsilon, int t, int m, int k = 0,
                                           const MetricConfig& metric = {});

/// Regular gridded scalar field indexed (time, lat, lon).
struct SSTField {
    std::vector<double> times;  // ascending
    std::vector<double> lons;   // ascending, regular
    std::vector<double> lats;   // ascending, regular
    std::vector<double> values; // [time][lat][lon], row-major

    double at(std::size_t ti, std::size_t lati, std::size_t loni) const {
        return values[(ti * lats.size() + lati) * lons.size() + loni];
    }
};

/// CSV `time,lon,lat,value`; the grid is inferred from the distinct sorted
/// coordinates and must be complete. Accepts NA/nan markers.
SSTField read_sst_csv(std::istream& in);
SSTField read_sst_csv_file(const std::string& path);

/// Bilinear sample of the field at one position and time slice.
double sst_sample(const SSTField& field, double lon, double lat, double time);

/// Mean of the bilinear field samples at the track's p points: the SST
/// series localized to the region the track occupies. Throws input_error
/// when a point leaves the grid.
double sst_over_track(const SSTField& field, const RegularTrack& track, double time);

std::map<int, double> read_condition_csv_file(const std::string& path);

}  // namespace trackdens
