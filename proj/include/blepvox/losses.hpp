#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "blepvox/audio_buffer.hpp"
#include "blepvox/error.hpp"
#include "blepvox/fft.hpp"
#include "blepvox/window.hpp"

namespace blepvox {

/// One STFT resolution: analysis window length, transform size, and hop.
struct StftConfig {
    std::size_t fft_size = 1024;
    std::size_t window_size = 1024;
    std::size_t hop = 256;
    Taper window = Taper::hann;
};

inline void validate(const StftConfig& config) {
    if (!fft::is_power_of_two(config.fft_size)) raise(Errc::bad_fft_size, "stft fft_size");
    if (config.window_size == 0 || config.window_size > config.fft_size) {
        raise(Errc::out_of_range, "window_size must lie in [1, fft_size]");
    }
    if (config.hop < 1 || config.hop > config.window_size) {
        raise(Errc::bad_hop, "hop must lie in [1, window_size]");
    }
}

/// The resolution set the spectral loss sums over, plus the magnitude floor
/// applied inside the log.
struct StftSet {
    std::vector<StftConfig> configs;
    double log_floor = 1e-7;

    /// Conventional multiscale ladder: fft sizes 2048..64, window = fft
    /// size, hop = a quarter window, Hann taper.
    static StftSet defaults() {
        StftSet set;
        for (std::size_t size : {2048u, 1024u, 512u, 256u, 128u, 64u}) {
            set.configs.push_back(StftConfig{size, size, size / 4, Taper::hann});
        }
        return set;
    }
};

inline void validate(const StftSet& set) {
    if (set.configs.empty()) raise(Errc::empty_input, "stft set has no configs");
    if (!(set.log_floor > 0.0)) raise(Errc::out_of_range, "log_floor must be positive");
    for (const auto& config : set.configs) validate(config);
}

/// Row-major frames-by-bins matrix of log magnitudes.
struct Spectrogram {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<double> values;

    double at(std::size_t frame, std::size_t bin) const { return values[frame * bins + bin]; }
};

/// ln(max(|STFT|, log_floor)) of every frame/bin. Frames start at multiples
/// of the hop; frame count is floor((len - window)/hop) + 1.
inline Spectrogram log_mag_stft(const AudioBuffer& x, const StftConfig& config, double log_floor) {
    validate(config);
    if (!(log_floor > 0.0)) raise(Errc::out_of_range, "log_floor must be positive");
    if (x.size() < config.window_size) {
        raise(Errc::too_short, "buffer shorter than the analysis window");
    }

    Spectrogram spec;
    spec.frames = (x.size() - config.window_size) / config.hop + 1;
    spec.bins = config.fft_size / 2 + 1;
    spec.values.resize(spec.frames * spec.bins);

    const std::vector<double> window = make_window(config.window, config.window_size, true);
    std::vector<double> frame(config.window_size);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const std::size_t start = f * config.hop;
        for (std::size_t i = 0; i < config.window_size; ++i) {
            frame[i] = static_cast<double>(x.samples[start + i]) * window[i];
        }
        const auto spectrum = fft::rfft(frame, config.fft_size);
        for (std::size_t b = 0; b < spec.bins; ++b) {
            const double mag = std::abs(spectrum[b]);
            spec.values[f * spec.bins + b] = std::log(mag > log_floor ? mag : log_floor);
        }
    }
    return spec;
}

/// Per-resolution Frobenius norms of the log-magnitude difference.
inline std::vector<double> spectral_loss_terms(const AudioBuffer& x, const AudioBuffer& x_hat,
                                               const StftSet& set) {
    validate(set);
    if (x.size() != x_hat.size()) raise(Errc::length_mismatch, "buffers differ in length");
    std::vector<double> terms;
    terms.reserve(set.configs.size());
    for (const auto& config : set.configs) {
        const Spectrogram a = log_mag_stft(x, config, set.log_floor);
        const Spectrogram b = log_mag_stft(x_hat, config, set.log_floor);
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const double d = a.values[i] - b.values[i];
            sum_sq += d * d;
        }
        terms.push_back(std::sqrt(sum_sq));
    }
    return terms;
}

/// Multiscale spectral loss: the sum over resolutions of the Frobenius norm
/// of log-magnitude spectrogram differences. Zero exactly when the two
/// signals have identical floored log spectra at every resolution.
inline double multiscale_spectral_loss(const AudioBuffer& x, const AudioBuffer& x_hat,
                                       const StftSet& set) {
    double total = 0.0;
    for (double term : spectral_loss_terms(x, x_hat, set)) total += term;
    return total;
}

struct F0LossResult {
    double value = 0.0;
    /// Set when the reference marks no frame voiced; the loss is then 0 by
    /// convention rather than an error.
    bool no_voiced_frames = false;
};

/// Mean absolute difference of natural-log f0 over voiced reference frames.
/// Unvoiced frames never contribute, so predictions there are free.
inline F0LossResult f0_loss(std::span<const double> f0_hat, std::span<const double> f0_ref,
                            const std::vector<bool>& voiced_ref) {
    if (f0_hat.size() != f0_ref.size() || f0_hat.size() != voiced_ref.size()) {
        raise(Errc::length_mismatch, "contour lengths differ");
    }
    double sum = 0.0;
    std::size_t voiced = 0;
    for (std::size_t i = 0; i < f0_hat.size(); ++i) {
        if (!voiced_ref[i]) continue;
        if (!(f0_hat[i] > 0.0) || !(f0_ref[i] > 0.0)) {
            raise(Errc::non_positive_f0_on_voiced, "frame " + std::to_string(i));
        }
        sum += std::abs(std::log(f0_hat[i]) - std::log(f0_ref[i]));
        ++voiced;
    }
    if (voiced == 0) return {0.0, true};
    return {sum / static_cast<double>(voiced), false};
}

/// Mean binary cross-entropy of the voicing probabilities against binary
/// reference labels, with the prediction clamped to [eps, 1 - eps].
inline double voicing_bce(std::span<const double> v, std::span<const double> v_ref,
                          double clamp_eps = 1e-7) {
    if (v.size() != v_ref.size()) raise(Errc::length_mismatch, "contour lengths differ");
    if (!(clamp_eps > 0.0) || !(clamp_eps < 0.5)) {
        raise(Errc::out_of_range, "clamp_eps must lie in (0, 0.5)");
    }
    if (v.empty()) raise(Errc::empty_input, "no frames");
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0) || !(v[i] <= 1.0)) {
            raise(Errc::out_of_range, "probability at frame " + std::to_string(i));
        }
        if (v_ref[i] != 0.0 && v_ref[i] != 1.0) {
            raise(Errc::out_of_range, "reference label at frame " + std::to_string(i) +
                                          " must be 0 or 1");
        }
        double p = v[i];
        if (p < clamp_eps) p = clamp_eps;
        if (p > 1.0 - clamp_eps) p = 1.0 - clamp_eps;
        sum += v_ref[i] == 1.0 ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(v.size());
}

struct GradCheckReport {
    double fd_h = 0.0;
    double fd_half_h = 0.0;
    double relative_gap = 0.0;
};

/// Central finite differences at steps h and h/2 plus their relative gap.
/// A small gap indicates the function is smooth at the probed scale; a
/// large one flags a kink or noise.
inline GradCheckReport grad_consistency_check(const std::function<double(double)>& f,
                                              double parameter, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) raise(Errc::out_of_range, "step must be positive");
    const auto eval = [&](double p) {
        double value;
        try {
            value = f(p);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            raise(Errc::evaluation_failed, e.what());
        }
        if (!std::isfinite(value)) raise(Errc::evaluation_failed, "non-finite value");
        return value;
    };

    GradCheckReport report;
    report.fd_h = (eval(parameter + step) - eval(parameter - step)) / (2.0 * step);
    report.fd_half_h = (eval(parameter + step / 2.0) - eval(parameter - step / 2.0)) / step;
    const double denom = std::abs(report.fd_half_h);
    report.relative_gap = std::abs(report.fd_h - report.fd_half_h) /
                          (denom > 1e-300 ? denom : 1e-300);
    return report;
}

/// The three training-objective components side by side. spectral always
/// equals the sum of per_scale.
struct LossReport {
    double spectral = 0.0;
    double f0 = 0.0;
    double voicing = 0.0;
    std::vector<double> per_scale;
    bool f0_no_voiced_frames = false;
};

} // namespace blepvox
