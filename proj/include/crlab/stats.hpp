#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace crlab {

// Linear-interpolation quantile (type 7). p in [0,1].
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p out of range");
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }

inline double iqr(const std::vector<double>& v) {
    return quantile(v, 0.75) - quantile(v, 0.25);
}

}  // namespace crlab
