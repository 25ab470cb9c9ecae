#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "blepvox/audio_buffer.hpp"
#include "blepvox/error.hpp"
#include "blepvox/fft.hpp"
#include "blepvox/oscillator.hpp"
#include "blepvox/window.hpp"

namespace blepvox {

/// Half-width, in bins, of the band credited to each harmonic. Covers the
/// analysis window's main lobe at worst-case bin offset.
inline constexpr std::size_t kHarmonicBandHalfWidth = 4;
/// Bins below this index form the DC band, excluded from both pools.
inline constexpr std::size_t kDcBandBins = 3;
/// Power floor for log-spectral distances: -120 dB, two decades below the
/// PCM-16 noise floor, far above double-precision artifacts.
inline constexpr double kLsdPowerFloor = 1e-12;
/// The analysis taper. Side lobes sit near -92 dB so window leakage stays
/// well below the alias floors being measured.
inline constexpr Taper kAnalysisTaper = Taper::blackman_harris;

namespace detail {

inline std::string fixed(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

inline std::string scientific(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision, value);
    return buf;
}

} // namespace detail

/// Decomposition of a constant-pitch render's spectral power into harmonic
/// and inharmonic (alias) parts. asr_db = 10 log10(alias/harmonic).
struct AliasReport {
    double f0 = 0.0;
    double sample_rate = 0.0;
    double harmonic_power = 0.0;
    double alias_power = 0.0;
    double asr_db = 0.0;
    std::size_t n_harmonics = 0;
};

/// Sawtooth built by summing exactly the Fourier partials below Nyquist:
///   x[n] = -(2/pi) sum_{k=1..K} sin(2 pi k (f0 n / sr + phase0)) / k,
/// K = floor((sr/2)/f0), with any partial landing exactly on Nyquist
/// dropped. Alias-free by construction; matches the 2*phase - 1 ramp in
/// scale and direction.
inline AudioBuffer additive_bandlimited_saw(double f0, double sample_rate, std::size_t n_samples,
                                            double phase0 = 0.0) {
    if (!(sample_rate > 0.0)) raise(Errc::bad_sample_rate, "sample_rate must be positive");
    if (!(f0 > 0.0)) raise(Errc::non_positive_f0, "f0 must be positive");
    if (f0 > sample_rate / 2.0) raise(Errc::above_nyquist, "f0 exceeds Nyquist");

    const std::size_t partials = static_cast<std::size_t>(std::floor(sample_rate / 2.0 / f0));
    std::vector<double> weights;
    weights.reserve(partials);
    for (std::size_t k = 1; k <= partials; ++k) {
        weights.push_back(static_cast<double>(k) * f0 == sample_rate / 2.0
                              ? 0.0
                              : 1.0 / static_cast<double>(k));
    }

    AudioBuffer out;
    out.sample_rate = sample_rate;
    out.samples.resize(n_samples);
    const double scale = -2.0 / std::numbers::pi;
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double base =
            std::fmod(f0 * static_cast<double>(n) / sample_rate + phase0, 1.0);
        double acc = 0.0;
        for (std::size_t k = 1; k <= partials; ++k) {
            if (weights[k - 1] == 0.0) continue;
            const double cycles = std::fmod(static_cast<double>(k) * base, 1.0);
            acc += std::sin(2.0 * std::numbers::pi * cycles) * weights[k - 1];
        }
        out.samples[n] = static_cast<float>(scale * acc);
    }
    return out;
}

/// Single-frame windowed periodogram over the longest power-of-two prefix
/// of the buffer. Normalized so a full-scale sinusoid at a bin center
/// peaks at 1; one-sided, with DC and Nyquist carrying their bare power.
inline std::vector<double> power_spectrum(const AudioBuffer& x, Taper window) {
    if (x.empty()) raise(Errc::empty_buffer, "cannot analyze an empty buffer");
    const std::size_t n = std::bit_floor(x.size());
    const std::vector<double> w = make_window(window, n, true);
    double w_sum = 0.0;
    for (double v : w) w_sum += v;

    std::vector<double> frame(n);
    for (std::size_t i = 0; i < n; ++i) frame[i] = static_cast<double>(x.samples[i]) * w[i];
    const auto spectrum = fft::rfft(frame, n);

    std::vector<double> power(spectrum.size());
    for (std::size_t b = 0; b < spectrum.size(); ++b) {
        const double scale = (b == 0 || b + 1 == spectrum.size()) ? 1.0 : 2.0;
        const double a = scale * std::abs(spectrum[b]) / w_sum;
        power[b] = a * a;
    }
    return power;
}

/// Splits a constant-f0 render's power into harmonic bands (within
/// kHarmonicBandHalfWidth bins of each multiple of f0 below Nyquist), the
/// DC band, and the alias remainder. The three pools partition the bins,
/// so harmonic + alias + DC always reproduces the total.
inline AliasReport alias_report(const AudioBuffer& x, double f0) {
    if (!(x.sample_rate > 0.0)) raise(Errc::bad_sample_rate, "buffer has no sample rate");
    if (static_cast<double>(x.size()) < 0.5 * x.sample_rate) {
        raise(Errc::buffer_too_short, "need at least half a second of audio");
    }
    const double sr = x.sample_rate;
    if (!(f0 > 0.0) || f0 > sr / 2.0) raise(Errc::f0_out_of_range, "f0 must lie in (0, Nyquist]");

    const std::vector<double> power = power_spectrum(x, kAnalysisTaper);
    const std::size_t n = std::bit_floor(x.size());
    const std::size_t nyquist_bin = n / 2;
    const double bin_width = sr / static_cast<double>(n);
    const double tolerance = static_cast<double>(kHarmonicBandHalfWidth) * bin_width;

    const double raw_count = std::floor((sr / 2.0 - tolerance) / f0);
    if (raw_count < 1.0) raise(Errc::f0_out_of_range, "no harmonic fits below Nyquist");
    const std::size_t n_harmonics = static_cast<std::size_t>(raw_count);

    std::vector<bool> in_harmonic_band(power.size(), false);
    for (std::size_t k = 1; k <= n_harmonics; ++k) {
        const double center = static_cast<double>(k) * f0 / bin_width;
        const std::size_t c = static_cast<std::size_t>(std::llround(center));
        const std::size_t lo = std::max(c - std::min(c, kHarmonicBandHalfWidth), kDcBandBins);
        const std::size_t hi = std::min(c + kHarmonicBandHalfWidth, nyquist_bin);
        for (std::size_t b = lo; b <= hi; ++b) in_harmonic_band[b] = true;
    }

    double total = 0.0, harmonic = 0.0, dc = 0.0;
    for (std::size_t b = 0; b < power.size(); ++b) {
        total += power[b];
        if (b < kDcBandBins) {
            dc += power[b];
        } else if (in_harmonic_band[b]) {
            harmonic += power[b];
        }
    }
    const double alias = std::max(total - harmonic - dc, 0.0);

    constexpr double tiny = 1e-30;
    AliasReport report;
    report.f0 = f0;
    report.sample_rate = sr;
    report.harmonic_power = harmonic;
    report.alias_power = alias;
    report.n_harmonics = n_harmonics;
    report.asr_db = 10.0 * std::log10(std::max(alias, tiny) / std::max(harmonic, tiny));
    return report;
}

/// Mean absolute log-power difference over non-DC bins, with both spectra
/// floored at kLsdPowerFloor.
inline double log_spectral_distance(const AudioBuffer& a, const AudioBuffer& b) {
    if (a.size() != b.size()) raise(Errc::length_mismatch, "buffers differ in length");
    const std::vector<double> pa = power_spectrum(a, kAnalysisTaper);
    const std::vector<double> pb = power_spectrum(b, kAnalysisTaper);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t bin = kDcBandBins; bin < pa.size(); ++bin) {
        const double la = std::log(std::max(pa[bin], kLsdPowerFloor));
        const double lb = std::log(std::max(pb[bin], kLsdPowerFloor));
        sum += std::abs(la - lb);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

struct OscComparisonRow {
    double f0 = 0.0;
    double asr_naive_db = 0.0;
    double asr_polyblep_db = 0.0;
    double asr_delta_db = 0.0; // naive minus polyblep; positive favors polyblep
    double lsd_naive = 0.0;
    double lsd_polyblep = 0.0;
};

inline constexpr std::string_view kComparisonCsvHeader =
    "f0_hz,asr_naive_db,asr_polyblep_db,asr_delta_db,lsd_naive,lsd_polyblep";

/// Renders both oscillators at each f0, measures alias ratios, and takes
/// the log-spectral distance of each against the additive oracle.
inline std::vector<OscComparisonRow> compare_oscillators(std::span<const double> f0_list,
                                                         double sample_rate, double duration_s) {
    if (!(sample_rate > 0.0)) raise(Errc::bad_sample_rate, "sample_rate must be positive");
    if (!(duration_s > 0.0)) raise(Errc::out_of_range, "duration must be positive");
    const std::size_t n =
        static_cast<std::size_t>(std::llround(duration_s * sample_rate));

    std::vector<OscComparisonRow> rows;
    rows.reserve(f0_list.size());
    for (double f0 : f0_list) {
        const AudioBuffer oracle = additive_bandlimited_saw(f0, sample_rate, n, 0.0);
        const std::vector<double> f0_per_sample(n, f0);
        const PhaseTrack track = accumulate_phase(f0_per_sample, sample_rate, 0.0);
        const AudioBuffer naive = naive_saw(track);
        const AudioBuffer blep = polyblep_saw(track);

        OscComparisonRow row;
        row.f0 = f0;
        row.asr_naive_db = alias_report(naive, f0).asr_db;
        row.asr_polyblep_db = alias_report(blep, f0).asr_db;
        row.asr_delta_db = row.asr_naive_db - row.asr_polyblep_db;
        row.lsd_naive = log_spectral_distance(naive, oracle);
        row.lsd_polyblep = log_spectral_distance(blep, oracle);
        rows.push_back(row);
    }
    return rows;
}

/// Fixed-header CSV rendering of a comparison table.
inline std::string comparison_csv(const std::vector<OscComparisonRow>& rows) {
    std::string csv(kComparisonCsvHeader);
    csv += '\n';
    for (const auto& row : rows) {
        csv += detail::fixed(row.f0, 6) + ',' + detail::fixed(row.asr_naive_db, 6) + ',' +
               detail::fixed(row.asr_polyblep_db, 6) + ',' + detail::fixed(row.asr_delta_db, 6) +
               ',' + detail::fixed(row.lsd_naive, 6) + ',' + detail::fixed(row.lsd_polyblep, 6) +
               '\n';
    }
    return csv;
}

} // namespace blepvox
