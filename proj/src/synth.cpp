#include "trackdens/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trackdens/rng.hpp"

namespace trackdens {

TrackSet synthesize_tracks(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.n < 1) throw std::invalid_argument("synthesize_tracks: n must be >= 1");
    if (spec.raw_points < 2) throw std::invalid_argument("synthesize_tracks: raw_points must be >= 2");

    TrackSet set;
    set.tracks.reserve(spec.n);
    set.years.reserve(spec.n);
    const Rng master(seed);
    const int year_span = spec.year_max - spec.year_min + 1;

    for (std::size_t i = 0; i < spec.n; ++i) {
        Rng rng = master.substream(i);
        const double g = rng.uniform();
        const double heading = rng.uniform(spec.heading_min, spec.heading_max);
        const double curvature = rng.uniform(spec.curvature_min, spec.curvature_max);

        const double gx = spec.genesis_lon0 + g * (spec.genesis_lon1 - spec.genesis_lon0);
        const double gy = spec.genesis_lat0 + g * (spec.genesis_lat1 - spec.genesis_lat0);
        const double ch = std::cos(heading);
        const double sh = std::sin(heading);

        RawTrack raw;
        raw.id = "S" + std::to_string(i);
        raw.points.resize(spec.raw_points);
        for (std::size_t j = 0; j < spec.raw_points; ++j) {
            // Parabolic bow in the heading frame. The bow profile
            // s^2 - (3/4) L s is orthogonal to the rotation profile s over
            // [0, L], so the three factors bend the track in decorrelated
            // directions of the track metric.
            const double s = spec.arc_length * static_cast<double>(j) /
                             static_cast<double>(spec.raw_points - 1);
            const double u = s;
            const double v = curvature * (s * s - 0.75 * spec.arc_length * s);
            raw.points[j].lon = gx + ch * u - sh * v;
            raw.points[j].lat = gy + sh * u + ch * v;
        }
        set.tracks.push_back(regularize(raw, spec.p));
        set.years.push_back(spec.year_min + static_cast<int>(i % static_cast<std::size_t>(year_span)));
    }
    return set;
}

}  // namespace trackdens
