#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blepvox/audio_buffer.hpp"
#include "blepvox/error.hpp"

namespace blepvox {

/// Per-sample normalized oscillator phase and its increment.
/// Invariants: phase in [0, 1), increment in [0, 0.5], equal lengths.
/// Phase accumulates in double; emitted samples quantize to float, so wrap
/// positions stay exact over long renders.
struct PhaseTrack {
    std::vector<double> phase;
    std::vector<double> increment;
    double sample_rate = 0.0;

    std::size_t size() const noexcept { return phase.size(); }
};

/// Integrates a per-sample f0 trajectory into a wrapped phase track:
///   phase[0] = initial_phase, phase[n] = (phase[n-1] + increment[n]) mod 1,
///   increment[n] = f0[n] / sample_rate.
inline PhaseTrack accumulate_phase(std::span<const double> f0_per_sample, double sample_rate,
                                   double initial_phase = 0.0) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        raise(Errc::bad_sample_rate, "sample_rate must be positive, got " + std::to_string(sample_rate));
    }
    if (!(initial_phase >= 0.0) || !(initial_phase < 1.0)) {
        raise(Errc::out_of_range, "initial_phase must lie in [0, 1)");
    }
    const double nyquist = sample_rate / 2.0;
    for (std::size_t n = 0; n < f0_per_sample.size(); ++n) {
        const double f0 = f0_per_sample[n];
        if (!std::isfinite(f0)) raise(Errc::non_finite, "f0 at sample " + std::to_string(n));
        if (f0 < 0.0) {
            raise(Errc::negative_f0, "f0 at sample " + std::to_string(n) + " is negative");
        }
        if (f0 > nyquist) {
            raise(Errc::above_nyquist, "f0 at sample " + std::to_string(n) + " exceeds Nyquist");
        }
    }

    PhaseTrack track;
    track.sample_rate = sample_rate;
    track.phase.resize(f0_per_sample.size());
    track.increment.resize(f0_per_sample.size());
    if (f0_per_sample.empty()) return track;

    double phase = initial_phase;
    track.phase[0] = phase;
    track.increment[0] = f0_per_sample[0] / sample_rate;
    for (std::size_t n = 1; n < f0_per_sample.size(); ++n) {
        const double inc = f0_per_sample[n] / sample_rate;
        phase += inc;
        if (phase >= 1.0) phase -= std::floor(phase);
        track.phase[n] = phase;
        track.increment[n] = inc;
    }
    return track;
}

/// Raw phase-accumulated sawtooth, 2*phase - 1. Jumps by almost the full
/// range at every wrap, which is what folds harmonics back below Nyquist.
inline AudioBuffer naive_saw(const PhaseTrack& track) {
    AudioBuffer out;
    out.sample_rate = track.sample_rate;
    out.samples.resize(track.size());
    for (std::size_t n = 0; n < track.size(); ++n) {
        out.samples[n] = static_cast<float>(2.0 * track.phase[n] - 1.0);
    }
    return out;
}

/// Two-sample piecewise-polynomial step residual:
///   t^2 + 2t + 1   for -1 <= t < 0
///  -t^2 + 2t - 1   for  0 <= t < 1
///   0              otherwise.
/// t is the offset from the nearest wrap in units of the phase increment.
inline double polyblep_residual(double t) {
    if (!std::isfinite(t)) raise(Errc::non_finite, "residual argument");
    if (t >= -1.0 && t < 0.0) return t * t + 2.0 * t + 1.0;
    if (t >= 0.0 && t < 1.0) return -t * t + 2.0 * t - 1.0;
    return 0.0;
}

/// Sign applied to the residual evaluated just before a wrap. The shipped
/// oscillator subtracts both residual terms; docs/polyblep_sign_experiment.csv
/// records the measured alias power of each convention.
enum class PreWrapResidualSign {
    subtract,
    add,
};

inline AudioBuffer polyblep_saw(const PhaseTrack& track, PreWrapResidualSign pre_wrap_sign) {
    AudioBuffer out;
    out.sample_rate = track.sample_rate;
    out.samples.resize(track.size());
    const double pre = pre_wrap_sign == PreWrapResidualSign::subtract ? -1.0 : 1.0;
    for (std::size_t n = 0; n < track.size(); ++n) {
        double value = 2.0 * track.phase[n] - 1.0;
        const double inc = track.increment[n];
        if (inc > 0.0) {
            // Both terms are evaluated at every sample; outside the two-sample
            // support the residual is exactly zero, so samples away from a
            // wrap match naive_saw bit for bit.
            value -= polyblep_residual(track.phase[n] / inc);
            value += pre * polyblep_residual((track.phase[n] - 1.0) / inc);
        }
        out.samples[n] = static_cast<float>(value);
    }
    return out;
}

/// Alias-corrected sawtooth: naive_saw with each wrap discontinuity replaced
/// by a two-sample polynomial transition.
inline AudioBuffer polyblep_saw(const PhaseTrack& track) {
    return polyblep_saw(track, PreWrapResidualSign::subtract);
}

} // namespace blepvox
