#pragma once

#include <cstdint>
#include <cstddef>

#include "trackdens/track.hpp"

namespace trackdens {

/// Synthetic storm-track generator with a known 3-factor latent structure:
/// genesis position along a fixed line, initial heading, and curvature.
/// Tracks are parabolic arcs of fixed length, so the intrinsic dimension of
/// the generated family is exactly 3.
struct SynthSpec {
    std::size_t n = 608;
    std::size_t p = 13;

    // Genesis line from (lon0,lat0) to (lon1,lat1); latent g in [0,1].
    // The three ranges are sized so each factor sweeps a comparable extent
    // in the track metric (about 300 degrees of summed displacement).
    double genesis_lon0 = -81.0;
    double genesis_lat0 = 11.0;
    double genesis_lon1 = -58.5;
    double genesis_lat1 = 17.5;

    // Initial heading in radians from due east; latent theta uniform here.
    double heading_min = 2.46;
    double heading_max = 3.69;

    // Signed curvature of the parabolic arc; negative bends the westward
    // tracks toward the north (recurvature).
    double curvature_min = -0.075;
    double curvature_max = 0.075;

    double arc_length = 40.0;       // degrees of path length
    std::size_t raw_points = 41;    // raw fixes before regularization

    int year_min = 1950;
    int year_max = 2005;
};

/// Deterministic for a given (spec, seed); track i depends only on (seed, i).
TrackSet synthesize_tracks(const SynthSpec& spec, std::uint64_t seed);

}  // namespace trackdens
