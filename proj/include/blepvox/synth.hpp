#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "blepvox/audio_buffer.hpp"
#include "blepvox/error.hpp"
#include "blepvox/fft.hpp"
#include "blepvox/oscillator.hpp"
#include "blepvox/window.hpp"

namespace blepvox {

inline constexpr double kDefaultSampleRate = 16000.0;
inline constexpr std::size_t kDefaultHop = 256;
inline constexpr std::size_t kDefaultFftSize = 512;
inline constexpr std::size_t kEnvelopePoints = 65;  // harmonic envelope grid, 0..Nyquist
inline constexpr std::size_t kFirTaps = 257;        // envelope filter length

/// Frame-rate fundamental frequency contour. f0 of 0 denotes an unvoiced
/// frame; voicing holds the gate probability in [0, 1].
struct F0Contour {
    std::vector<double> f0;
    std::vector<double> voicing;
    std::size_t hop = kDefaultHop;
    double sample_rate = kDefaultSampleRate;

    std::size_t frames() const noexcept { return f0.size(); }
};

inline void validate(const F0Contour& contour) {
    if (contour.f0.size() != contour.voicing.size()) {
        raise(Errc::length_mismatch, "f0 and voicing frame counts differ");
    }
    if (contour.hop < 1) raise(Errc::bad_hop, "hop must be at least 1");
    if (!(contour.sample_rate > 0.0)) raise(Errc::bad_sample_rate, "sample_rate must be positive");
    const double nyquist = contour.sample_rate / 2.0;
    for (std::size_t i = 0; i < contour.f0.size(); ++i) {
        const double f0 = contour.f0[i];
        if (!std::isfinite(f0) || f0 < 0.0 || f0 > nyquist) {
            raise(Errc::f0_out_of_range, "frame " + std::to_string(i));
        }
        const double v = contour.voicing[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            raise(Errc::out_of_range, "voicing at frame " + std::to_string(i));
        }
    }
}

/// Everything the synthesizer needs for one utterance: the contour, one
/// harmonic-envelope row and one noise-magnitude row per frame, and the
/// noise seed.
struct SynthParams {
    F0Contour contour;
    std::vector<std::vector<double>> harmonic_env; // frames x E, values >= 0
    std::vector<std::vector<double>> noise_mag;    // frames x (fft_size/2 + 1), values >= 0
    std::size_t fft_size = kDefaultFftSize;
    std::uint64_t seed = 0;

    std::size_t frames() const noexcept { return contour.frames(); }
    std::size_t total_samples() const noexcept { return contour.frames() * contour.hop; }
};

inline void validate(const SynthParams& params) {
    validate(params.contour);
    if (!fft::is_power_of_two(params.fft_size)) {
        raise(Errc::bad_fft_size, "fft_size must be a power of two");
    }
    if (params.contour.hop > params.fft_size) {
        raise(Errc::bad_hop, "hop must not exceed fft_size");
    }
    if (params.harmonic_env.size() != params.frames() || params.noise_mag.size() != params.frames()) {
        raise(Errc::length_mismatch, "per-frame array counts do not match the contour");
    }
    const std::size_t bins = params.fft_size / 2 + 1;
    const std::size_t env_points = params.harmonic_env.empty() ? 0 : params.harmonic_env.front().size();
    for (std::size_t i = 0; i < params.frames(); ++i) {
        if (params.harmonic_env[i].size() != env_points || env_points == 0) {
            raise(Errc::empty_envelope, "harmonic_env at frame " + std::to_string(i));
        }
        for (double a : params.harmonic_env[i]) {
            if (!std::isfinite(a) || a < 0.0) {
                raise(Errc::non_finite_envelope, "harmonic_env at frame " + std::to_string(i));
            }
        }
        if (params.noise_mag[i].size() != bins) {
            raise(Errc::bad_bin_count, "noise_mag at frame " + std::to_string(i) + " must have " +
                                           std::to_string(bins) + " bins");
        }
        for (double m : params.noise_mag[i]) {
            if (!std::isfinite(m) || m < 0.0) {
                raise(Errc::out_of_range, "noise_mag at frame " + std::to_string(i));
            }
        }
    }
}

/// Linear interpolation of frame values onto the sample grid. Frame i sits
/// at sample i*hop; the ends extrapolate by holding the edge value.
inline std::vector<double> upsample_frames(std::span<const double> values, std::size_t hop,
                                           std::size_t n_samples) {
    if (values.empty()) raise(Errc::empty_input, "no frames to upsample");
    if (hop < 1) raise(Errc::bad_hop, "hop must be at least 1");

    std::vector<double> out(n_samples);
    if (values.size() == 1) {
        std::fill(out.begin(), out.end(), values[0]);
        return out;
    }
    const double last_center = static_cast<double>((values.size() - 1) * hop);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double pos = static_cast<double>(s) / static_cast<double>(hop);
        if (static_cast<double>(s) >= last_center) {
            out[s] = values.back();
            continue;
        }
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        out[s] = values[i] + frac * (values[i + 1] - values[i]);
    }
    return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform doubles in [0, 1) from the top 53 bits of mt19937_64, which the
/// standard pins exactly; bit-identical streams on every platform.
class UnitUniform {
public:
    explicit UnitUniform(std::uint64_t seed) : engine_(seed) {}

    double next() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace detail

/// Filtered-noise branch: per frame, draw uniform random magnitudes in
/// [0, 1) and uniform random phases per bin, shape them by the frame's
/// noise magnitudes, inverse-transform, taper, and overlap-add at the hop.
/// The DC and Nyquist bins keep zero imaginary parts. Frames are seeded
/// independently from (seed, frame index), so equal seeds give bit-identical
/// renders and frames could be generated in parallel.
inline AudioBuffer synth_noise(const std::vector<std::vector<double>>& noise_mag,
                               std::size_t fft_size, std::size_t hop, std::size_t n_samples,
                               std::uint64_t seed, double sample_rate) {
    if (!fft::is_power_of_two(fft_size)) raise(Errc::bad_fft_size, "fft_size must be a power of two");
    const std::size_t bins = fft_size / 2 + 1;
    if (hop < 1 || hop > fft_size) raise(Errc::bad_hop, "hop must lie in [1, fft_size]");
    for (std::size_t i = 0; i < noise_mag.size(); ++i) {
        if (noise_mag[i].size() != bins) {
            raise(Errc::bad_bin_count, "noise_mag frame " + std::to_string(i) + " must have " +
                                           std::to_string(bins) + " bins");
        }
    }

    std::vector<double> accum(n_samples, 0.0);
    const std::vector<double> taper = make_window(Taper::hann, fft_size, true);
    std::vector<std::complex<double>> spectrum(bins);

    for (std::size_t frame = 0; frame < noise_mag.size(); ++frame) {
        detail::UnitUniform rng(detail::splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (frame + 1))));
        for (std::size_t b = 0; b < bins; ++b) {
            const double u = rng.next();
            const double theta = rng.next() * 2.0 * std::numbers::pi;
            const double mag = noise_mag[frame][b] * u;
            if (b == 0 || b == bins - 1) {
                spectrum[b] = std::complex<double>(mag * std::cos(theta), 0.0);
            } else {
                spectrum[b] = std::polar(mag, theta);
            }
        }
        const std::vector<double> wave = fft::irfft(spectrum, fft_size);
        const std::size_t start = frame * hop;
        for (std::size_t j = 0; j < fft_size && start + j < n_samples; ++j) {
            accum[start + j] += wave[j] * taper[j];
        }
    }

    AudioBuffer out;
    out.sample_rate = sample_rate;
    out.samples.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) out.samples[i] = static_cast<float>(accum[i]);
    return out;
}

namespace detail {

/// Zero-phase FIR taps from an envelope sampled on a uniform 0..Nyquist
/// grid: interpolate onto design_fft/2+1 bins, inverse-transform, center,
/// and taper to kFirTaps points.
inline std::vector<double> design_envelope_fir(std::span<const double> envelope,
                                               std::size_t design_fft) {
    const std::size_t bins = design_fft / 2 + 1;
    std::vector<std::complex<double>> response(bins);
    if (envelope.size() == 1) {
        for (std::size_t b = 0; b < bins; ++b) response[b] = envelope[0];
    } else {
        const double scale = static_cast<double>(envelope.size() - 1) / static_cast<double>(bins - 1);
        for (std::size_t b = 0; b < bins; ++b) {
            const double pos = static_cast<double>(b) * scale;
            std::size_t i = static_cast<std::size_t>(pos);
            if (i >= envelope.size() - 1) i = envelope.size() - 2;
            const double frac = pos - static_cast<double>(i);
            response[b] = envelope[i] + frac * (envelope[i + 1] - envelope[i]);
        }
    }

    const std::vector<double> impulse = fft::irfft(response, design_fft);

    std::size_t taps = kFirTaps < design_fft - 1 ? kFirTaps : design_fft - 1;
    if (taps % 2 == 0) --taps;
    const std::size_t half = taps / 2;
    const std::vector<double> taper = make_window(Taper::hann, taps, false);
    std::vector<double> h(taps);
    for (std::size_t j = 0; j < taps; ++j) {
        // Tap j sits at signed offset j - half; negative offsets wrap to the
        // top of the circular impulse response.
        const std::size_t idx = (design_fft + j - half) % design_fft;
        h[j] = impulse[idx] * taper[j];
    }
    return h;
}

} // namespace detail

/// Frame-wise spectral shaping of the excitation. Each frame's envelope is
/// realized as a zero-phase FIR by frequency sampling; hop-sized blocks are
/// convolved and overlap-added, with the filter centered so the output is
/// time-aligned with the input. An all-ones envelope passes the signal
/// through unchanged up to rounding.
inline AudioBuffer apply_harmonic_envelope(const AudioBuffer& excitation,
                                           const std::vector<std::vector<double>>& harmonic_env,
                                           std::size_t hop,
                                           std::size_t design_fft = kDefaultFftSize) {
    if (harmonic_env.empty()) raise(Errc::empty_envelope, "no envelope frames");
    if (hop < 1) raise(Errc::bad_hop, "hop must be at least 1");
    if (!fft::is_power_of_two(design_fft)) raise(Errc::bad_fft_size, "design fft size");
    const std::size_t frames = harmonic_env.size();
    const std::size_t n = excitation.size();
    if (n > frames * hop || n + hop <= frames * hop) {
        raise(Errc::length_mismatch, "excitation length " + std::to_string(n) +
                                         " inconsistent with " + std::to_string(frames) +
                                         " frames of hop " + std::to_string(hop));
    }
    for (std::size_t i = 0; i < frames; ++i) {
        if (harmonic_env[i].empty()) raise(Errc::empty_envelope, "frame " + std::to_string(i));
        for (double a : harmonic_env[i]) {
            if (!std::isfinite(a)) raise(Errc::non_finite_envelope, "frame " + std::to_string(i));
        }
    }

    std::vector<double> accum(n, 0.0);
    for (std::size_t frame = 0; frame < frames; ++frame) {
        const std::vector<double> h = detail::design_envelope_fir(harmonic_env[frame], design_fft);
        const std::size_t half = h.size() / 2;
        const std::size_t begin = frame * hop;
        const std::size_t end = std::min(begin + hop, n);
        for (std::size_t s = begin; s < end; ++s) {
            const double x = static_cast<double>(excitation.samples[s]);
            if (x == 0.0) continue;
            for (std::size_t j = 0; j < h.size(); ++j) {
                const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(s + j) -
                                         static_cast<std::ptrdiff_t>(half);
                if (t < 0 || t >= static_cast<std::ptrdiff_t>(n)) continue;
                accum[static_cast<std::size_t>(t)] += x * h[j];
            }
        }
    }

    AudioBuffer out;
    out.sample_rate = excitation.sample_rate;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = static_cast<float>(accum[i]);
    return out;
}

/// Soft multiplicative voicing gate on the harmonic branch.
inline AudioBuffer gate_voicing(const AudioBuffer& harmonic,
                                std::span<const double> voicing_per_sample) {
    if (harmonic.size() != voicing_per_sample.size()) {
        raise(Errc::length_mismatch, "voicing and harmonic lengths differ");
    }
    AudioBuffer out;
    out.sample_rate = harmonic.sample_rate;
    out.samples.resize(harmonic.size());
    for (std::size_t n = 0; n < harmonic.size(); ++n) {
        out.samples[n] =
            static_cast<float>(voicing_per_sample[n] * static_cast<double>(harmonic.samples[n]));
    }
    return out;
}

enum class OscillatorKind {
    naive,
    polyblep,
};

/// Full excitation-to-waveform path: upsample the contour, run the
/// oscillator, shape it with the per-frame envelope filter, gate it by
/// voicing, and add the filtered-noise branch. Output length is always
/// frames * hop, and a fixed seed gives a bit-identical render.
inline AudioBuffer synthesize(const SynthParams& params,
                              OscillatorKind kind = OscillatorKind::polyblep) {
    validate(params);
    const std::size_t n = params.total_samples();
    const std::size_t hop = params.contour.hop;
    const double sr = params.contour.sample_rate;

    AudioBuffer out;
    out.sample_rate = sr;
    out.samples.assign(n, 0.0f);
    if (n == 0) return out;

    const std::vector<double> f0_per_sample = upsample_frames(params.contour.f0, hop, n);
    const std::vector<double> voicing_per_sample = upsample_frames(params.contour.voicing, hop, n);

    const PhaseTrack track = accumulate_phase(f0_per_sample, sr, 0.0);
    const AudioBuffer excitation = kind == OscillatorKind::polyblep ? polyblep_saw(track)
                                                                    : naive_saw(track);
    const AudioBuffer shaped =
        apply_harmonic_envelope(excitation, params.harmonic_env, hop, params.fft_size);
    const AudioBuffer gated = gate_voicing(shaped, voicing_per_sample);
    const AudioBuffer noise =
        synth_noise(params.noise_mag, params.fft_size, hop, n, params.seed, sr);

    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = gated.samples[i] + noise.samples[i];
    }
    return out;
}

} // namespace blepvox
