#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blepvox {

/// Error categories raised by the library. Codes marked (validation) reject
/// bad inputs; codes marked (io) report file-system or file-format failures.
enum class Errc {
    negative_f0,               // validation
    above_nyquist,             // validation
    bad_sample_rate,           // validation
    non_finite,                // validation
    empty_input,               // validation
    bad_bin_count,             // validation
    bad_hop,                   // validation
    bad_fft_size,              // validation
    empty_envelope,            // validation
    non_finite_envelope,       // validation
    length_mismatch,           // validation
    too_short,                 // validation
    non_positive_f0,           // validation
    non_positive_f0_on_voiced, // validation
    out_of_range,              // validation
    evaluation_failed,         // validation
    empty_buffer,              // validation
    buffer_too_short,          // validation
    f0_out_of_range,           // validation
    schema_violation,          // validation
    version_mismatch,          // validation
    not_found,                 // io
    unsupported_format,        // io
    corrupt_header,            // io
    io_error,                  // io
};

constexpr std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::negative_f0: return "negative_f0";
        case Errc::above_nyquist: return "above_nyquist";
        case Errc::bad_sample_rate: return "bad_sample_rate";
        case Errc::non_finite: return "non_finite";
        case Errc::empty_input: return "empty_input";
        case Errc::bad_bin_count: return "bad_bin_count";
        case Errc::bad_hop: return "bad_hop";
        case Errc::bad_fft_size: return "bad_fft_size";
        case Errc::empty_envelope: return "empty_envelope";
        case Errc::non_finite_envelope: return "non_finite_envelope";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::too_short: return "too_short";
        case Errc::non_positive_f0: return "non_positive_f0";
        case Errc::non_positive_f0_on_voiced: return "non_positive_f0_on_voiced";
        case Errc::out_of_range: return "out_of_range";
        case Errc::evaluation_failed: return "evaluation_failed";
        case Errc::empty_buffer: return "empty_buffer";
        case Errc::buffer_too_short: return "buffer_too_short";
        case Errc::f0_out_of_range: return "f0_out_of_range";
        case Errc::schema_violation: return "schema_violation";
        case Errc::version_mismatch: return "version_mismatch";
        case Errc::not_found: return "not_found";
        case Errc::unsupported_format: return "unsupported_format";
        case Errc::corrupt_header: return "corrupt_header";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

/// True for codes that reject malformed input rather than report I/O trouble.
constexpr bool is_validation_error(Errc code) {
    switch (code) {
        case Errc::not_found:
        case Errc::unsupported_format:
        case Errc::corrupt_header:
        case Errc::io_error:
            return false;
        default:
            return true;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace blepvox
