#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "blepvox/error.hpp"

namespace blepvox {

/// Mono sampled waveform, the currency passed between every stage.
/// Samples are 32-bit floats in nominal [-1, 1]; generation and analysis
/// happen in double and quantize on store.
struct AudioBuffer {
    std::vector<float> samples;
    double sample_rate = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    double duration_seconds() const noexcept {
        return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

inline void require_finite(const AudioBuffer& buffer, const char* what) {
    for (float s : buffer.samples) {
        if (!std::isfinite(s)) {
            raise(Errc::non_finite, std::string(what) + " contains a non-finite sample");
        }
    }
}

} // namespace blepvox
