#pragma once

#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

#include "blepvox/error.hpp"

namespace blepvox {

enum class Taper {
    rectangular,
    hann,
    blackman_harris, // minimum 4-term, -92 dB side lobes
};

constexpr std::string_view taper_name(Taper taper) {
    switch (taper) {
        case Taper::rectangular: return "rectangular";
        case Taper::hann: return "hann";
        case Taper::blackman_harris: return "blackman_harris";
    }
    return "unknown";
}

inline Taper taper_from_name(std::string_view name) {
    if (name == "rectangular" || name == "rect") return Taper::rectangular;
    if (name == "hann") return Taper::hann;
    if (name == "blackman_harris" || name == "bh4") return Taper::blackman_harris;
    raise(Errc::out_of_range, "unknown taper '" + std::string(name) + "'");
}

/// Cosine-sum taper of length n. Periodic tapers suit spectral analysis;
/// symmetric ones suit FIR design (peak at (n-1)/2, zeros at both ends).
inline std::vector<double> make_window(Taper taper, std::size_t n, bool periodic = true) {
    std::vector<double> w(n, 1.0);
    if (n == 0 || taper == Taper::rectangular) return w;
    if (n == 1) return w;

    const double denom = periodic ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double step = 2.0 * std::numbers::pi / denom;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = step * static_cast<double>(i);
        switch (taper) {
            case Taper::hann:
                w[i] = 0.5 - 0.5 * std::cos(t);
                break;
            case Taper::blackman_harris:
                w[i] = 0.35875 - 0.48829 * std::cos(t) + 0.14128 * std::cos(2.0 * t) -
                       0.01168 * std::cos(3.0 * t);
                break;
            case Taper::rectangular:
                break;
        }
    }
    return w;
}

} // namespace blepvox
