#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "blepvox/error.hpp"

// Self-contained radix-2 FFT. Every transform size in this library is a
// power of two, and a fixed local implementation keeps renders bit-identical
// across machines, which the determinism contract needs.

namespace blepvox::fft {

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

/// In-place iterative radix-2 transform. size() must be a power of two.
inline void transform(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) {
        raise(Errc::bad_fft_size, "fft size must be a power of two, got " + std::to_string(n));
    }
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> w_len(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= w_len;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

/// Forward real transform: n real samples (zero-padded to fft_size) to
/// fft_size/2 + 1 complex bins.
inline std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t fft_size) {
    std::vector<std::complex<double>> buf(fft_size, std::complex<double>(0.0, 0.0));
    const std::size_t n = x.size() < fft_size ? x.size() : fft_size;
    for (std::size_t i = 0; i < n; ++i) buf[i] = std::complex<double>(x[i], 0.0);
    transform(buf, false);
    buf.resize(fft_size / 2 + 1);
    return buf;
}

/// Inverse real transform of a half spectrum (fft_size/2 + 1 bins) back to
/// fft_size real samples. The upper half is rebuilt by conjugate symmetry;
/// the imaginary parts of the DC and Nyquist bins are ignored.
inline std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t fft_size) {
    if (half.size() != fft_size / 2 + 1) {
        raise(Errc::bad_bin_count, "expected " + std::to_string(fft_size / 2 + 1) +
                                       " bins, got " + std::to_string(half.size()));
    }
    std::vector<std::complex<double>> buf(fft_size);
    buf[0] = std::complex<double>(half[0].real(), 0.0);
    buf[fft_size / 2] = std::complex<double>(half[fft_size / 2].real(), 0.0);
    for (std::size_t b = 1; b < fft_size / 2; ++b) {
        buf[b] = half[b];
        buf[fft_size - b] = std::conj(half[b]);
    }
    transform(buf, true);
    std::vector<double> out(fft_size);
    for (std::size_t i = 0; i < fft_size; ++i) out[i] = buf[i].real();
    return out;
}

} // namespace blepvox::fft
