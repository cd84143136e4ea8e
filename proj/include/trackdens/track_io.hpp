#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "trackdens/track.hpp"

namespace trackdens {

enum class TrackFormat { csv, hurdat };

struct ParseResult {
    std::vector<RawTrack> tracks;
    std::vector<int> years;  // aligned with tracks; 0 when the source has no dates
    std::vector<std::string> warnings;
};

/// Track CSV: header `id,seq,lon,lat`, one row per fix, decimal degrees.
/// HURDAT-like: header `ID,NAME,COUNT` then COUNT rows
/// `timestamp,lat-with-hemisphere,lon-with-hemisphere,...` (trailing columns
/// ignored). Malformed records throw parse_error with the line number;
/// tracks with fewer than 2 points are dropped with a warning.
ParseResult parse_tracks(std::istream& in, TrackFormat format);
ParseResult parse_tracks_file(const std::string& path, TrackFormat format);

void write_tracks_csv(std::ostream& out, const std::vector<RegularTrack>& tracks);
void write_tracks_csv_file(const std::string& path, const std::vector<RegularTrack>& tracks);

/// Year sidecar for plain-CSV inputs: header `id,year`.
std::map<std::string, int> read_years_csv(std::istream& in);
std::map<std::string, int> read_years_csv_file(const std::string& path);
void write_years_csv_file(const std::string& path, const TrackSet& set);

/// Regularize every parsed track and attach years. Warnings from parsing are
/// appended to `warnings` when non-null.
TrackSet build_track_set(const ParseResult& parsed, std::size_t p,
                         std::vector<std::string>* warnings = nullptr);

/// Canonical content hash of a track set (ids, points, years).
std::string track_set_hash(const TrackSet& set);

}  // namespace trackdens
