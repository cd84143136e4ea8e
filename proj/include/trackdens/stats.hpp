#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace trackdens {

/// Percentile with linear interpolation between order statistics, q in [0,1].
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    if (q <= 0.0) return values.front();
    if (q >= 1.0) return values.back();
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count == 0 || !(lo > 0.0) || !(hi > 0.0))
        throw std::invalid_argument("log_spaced: need positive bounds and count");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = std::sqrt(lo * hi);
        return out;
    }
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

}  // namespace trackdens
