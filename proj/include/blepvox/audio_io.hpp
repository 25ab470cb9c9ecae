#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blepvox/audio_buffer.hpp"
#include "blepvox/error.hpp"
#include "blepvox/synth.hpp"

namespace blepvox {

inline constexpr int kParamSchemaVersion = 1;

enum class WavFormat {
    pcm16,
    float32,
};

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

inline void put_tag(std::vector<std::uint8_t>& out, const char tag[5]) {
    out.insert(out.end(), tag, tag + 4);
}

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& data) : data_(data) {}

    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        const std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                                (static_cast<std::uint32_t>(data_[pos_ + 1]) << 8) |
                                (static_cast<std::uint32_t>(data_[pos_ + 2]) << 16) |
                                (static_cast<std::uint32_t>(data_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    std::string tag() {
        need(4);
        std::string t(reinterpret_cast<const char*>(data_.data() + pos_), 4);
        pos_ += 4;
        return t;
    }

    const std::uint8_t* bytes(std::size_t count) {
        need(count);
        const std::uint8_t* p = data_.data() + pos_;
        pos_ += count;
        return p;
    }

    void skip(std::size_t count) {
        need(count);
        pos_ += count;
    }

    bool at_end() const { return pos_ >= data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t count) const {
        if (pos_ + count > data_.size()) {
            raise(Errc::corrupt_header, "file truncated");
        }
    }

    const std::vector<std::uint8_t>& data_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Writes a mono RIFF/WAVE file with the canonical 44-byte header.
/// float32 stores the samples bit-exactly; pcm16 rounds to nearest with
/// saturation at full scale (mapping convention: divisor 32768).
inline void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                      WavFormat format = WavFormat::float32) {
    require_finite(buffer, "wav output");
    if (!(buffer.sample_rate > 0.0)) raise(Errc::bad_sample_rate, "buffer has no sample rate");

    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint16_t block_align = static_cast<std::uint16_t>(bits / 8);
    const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(buffer.sample_rate));
    const std::uint32_t data_size = static_cast<std::uint32_t>(buffer.size() * block_align);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    detail::put_tag(out, "RIFF");
    detail::put_u32(out, 36 + data_size);
    detail::put_tag(out, "WAVE");
    detail::put_tag(out, "fmt ");
    detail::put_u32(out, 16);
    detail::put_u16(out, format == WavFormat::pcm16 ? 1 : 3);
    detail::put_u16(out, 1); // mono
    detail::put_u32(out, rate);
    detail::put_u32(out, rate * block_align);
    detail::put_u16(out, block_align);
    detail::put_u16(out, bits);
    detail::put_tag(out, "data");
    detail::put_u32(out, data_size);

    if (format == WavFormat::pcm16) {
        for (float s : buffer.samples) {
            double scaled = std::nearbyint(static_cast<double>(s) * 32768.0);
            if (scaled > 32767.0) scaled = 32767.0;
            if (scaled < -32768.0) scaled = -32768.0;
            detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
        }
    } else {
        for (float s : buffer.samples) {
            std::uint32_t bits32;
            std::memcpy(&bits32, &s, sizeof bits32);
            detail::put_u32(out, bits32);
        }
    }

    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) raise(Errc::io_error, "cannot open " + path.string() + " for writing");
    stream.write(reinterpret_cast<const char*>(out.data()),
                 static_cast<std::streamsize>(out.size()));
    if (!stream) raise(Errc::io_error, "short write to " + path.string());
}

/// Reads a mono PCM-16 or IEEE float32 WAV. PCM-16 maps to [-1, 1) by
/// division by 32768; float passes through bit-exactly.
inline AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) raise(Errc::not_found, "cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(stream)),
                                   std::istreambuf_iterator<char>());

    detail::ByteReader reader(data);
    if (reader.tag() != "RIFF") raise(Errc::corrupt_header, "missing RIFF tag");
    reader.u32(); // declared riff size; the actual buffer bounds are authoritative
    if (reader.tag() != "WAVE") raise(Errc::corrupt_header, "missing WAVE tag");

    bool have_fmt = false;
    std::uint16_t format_tag = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;

    while (!reader.at_end()) {
        const std::string chunk = reader.tag();
        const std::uint32_t size = reader.u32();
        if (chunk == "fmt ") {
            if (size < 16) raise(Errc::corrupt_header, "fmt chunk too small");
            format_tag = reader.u16();
            channels = reader.u16();
            rate = reader.u32();
            reader.u32(); // byte rate
            reader.u16(); // block align
            bits = reader.u16();
            reader.skip(size - 16);
            have_fmt = true;
        } else if (chunk == "data") {
            if (!have_fmt) raise(Errc::corrupt_header, "data chunk before fmt");
            if (channels != 1) raise(Errc::unsupported_format, "only mono is supported");
            if (rate == 0) raise(Errc::corrupt_header, "zero sample rate");

            AudioBuffer buffer;
            buffer.sample_rate = static_cast<double>(rate);
            if (format_tag == 1 && bits == 16) {
                const std::size_t count = size / 2;
                const std::uint8_t* p = reader.bytes(count * 2);
                buffer.samples.resize(count);
                for (std::size_t i = 0; i < count; ++i) {
                    const std::int16_t v =
                        static_cast<std::int16_t>(p[2 * i] | (p[2 * i + 1] << 8));
                    buffer.samples[i] = static_cast<float>(v) / 32768.0f;
                }
            } else if (format_tag == 3 && bits == 32) {
                const std::size_t count = size / 4;
                const std::uint8_t* p = reader.bytes(count * 4);
                buffer.samples.resize(count);
                std::memcpy(buffer.samples.data(), p, count * 4);
                for (float s : buffer.samples) {
                    if (!std::isfinite(s)) raise(Errc::corrupt_header, "non-finite sample data");
                }
            } else {
                raise(Errc::unsupported_format,
                      "format tag " + std::to_string(format_tag) + " at " + std::to_string(bits) +
                          " bits is not supported");
            }
            return buffer;
        } else {
            reader.skip(size + (size % 2)); // chunks are word-aligned
        }
    }
    raise(Errc::corrupt_header, "no data chunk");
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& object, const char* key,
                                   const std::string& path) {
    const auto it = object.find(key);
    if (it == object.end()) {
        raise(Errc::schema_violation, "missing field " + path + key);
    }
    return *it;
}

inline double number_field(const nlohmann::json& object, const char* key,
                           const std::string& path) {
    const auto& value = field(object, key, path);
    if (!value.is_number()) raise(Errc::schema_violation, path + key + " must be a number");
    return value.get<double>();
}

inline std::vector<double> array_field(const nlohmann::json& object, const char* key,
                                       const std::string& path) {
    const auto& value = field(object, key, path);
    if (!value.is_array()) raise(Errc::schema_violation, path + key + " must be an array");
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_number()) raise(Errc::schema_violation, path + key + " must hold numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

} // namespace detail

/// Loads and fully validates a parameter file; a returned SynthParams always
/// satisfies every synthesis invariant.
inline SynthParams read_params(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) raise(Errc::not_found, "cannot open " + path.string());

    nlohmann::json root;
    try {
        root = nlohmann::json::parse(stream);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::schema_violation, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) raise(Errc::schema_violation, "top level must be an object");

    const auto& version = detail::field(root, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != kParamSchemaVersion) {
        raise(Errc::version_mismatch, "schema_version must be " +
                                          std::to_string(kParamSchemaVersion));
    }

    SynthParams params;
    params.contour.sample_rate = detail::number_field(root, "sample_rate", "");
    if (!(params.contour.sample_rate > 0.0)) {
        raise(Errc::schema_violation, "sample_rate must be positive");
    }
    const double hop = detail::number_field(root, "hop", "");
    if (hop < 1.0 || hop != std::floor(hop)) {
        raise(Errc::schema_violation, "hop must be a positive integer");
    }
    params.contour.hop = static_cast<std::size_t>(hop);
    const double fft_size = detail::number_field(root, "fft_size", "");
    if (fft_size < 2.0 || fft_size != std::floor(fft_size) ||
        !fft::is_power_of_two(static_cast<std::size_t>(fft_size))) {
        raise(Errc::schema_violation, "fft_size must be a power of two");
    }
    params.fft_size = static_cast<std::size_t>(fft_size);
    if (params.contour.hop > params.fft_size) {
        raise(Errc::schema_violation, "hop must not exceed fft_size");
    }

    const auto& seed = detail::field(root, "seed", "");
    if (!seed.is_number_integer()) raise(Errc::schema_violation, "seed must be an integer");
    params.seed = seed.get<std::uint64_t>();

    const auto& frames = detail::field(root, "frames", "");
    if (!frames.is_array()) raise(Errc::schema_violation, "frames must be an array");

    const double nyquist = params.contour.sample_rate / 2.0;
    const std::size_t bins = params.fft_size / 2 + 1;
    std::size_t env_points = 0;
    std::size_t index = 0;
    for (const auto& frame : frames) {
        const std::string path_prefix = "frames[" + std::to_string(index) + "].";
        if (!frame.is_object()) {
            raise(Errc::schema_violation, "frames[" + std::to_string(index) + "] must be an object");
        }
        const double f0 = detail::number_field(frame, "f0", path_prefix);
        if (!std::isfinite(f0) || f0 < 0.0 || f0 > nyquist) {
            raise(Errc::schema_violation, path_prefix + "f0 out of [0, Nyquist]");
        }
        const double voicing = detail::number_field(frame, "voicing", path_prefix);
        if (!std::isfinite(voicing) || voicing < 0.0 || voicing > 1.0) {
            raise(Errc::schema_violation, path_prefix + "voicing out of [0, 1]");
        }
        std::vector<double> env = detail::array_field(frame, "harmonic_env", path_prefix);
        if (env.empty()) raise(Errc::schema_violation, path_prefix + "harmonic_env is empty");
        if (index == 0) env_points = env.size();
        if (env.size() != env_points) {
            raise(Errc::schema_violation, path_prefix + "harmonic_env length differs from frame 0");
        }
        for (double a : env) {
            if (!std::isfinite(a) || a < 0.0) {
                raise(Errc::schema_violation, path_prefix + "harmonic_env has negative or non-finite values");
            }
        }
        std::vector<double> mags = detail::array_field(frame, "noise_mag", path_prefix);
        if (mags.size() != bins) {
            raise(Errc::schema_violation, path_prefix + "noise_mag must have " +
                                              std::to_string(bins) + " bins");
        }
        for (double m : mags) {
            if (!std::isfinite(m) || m < 0.0) {
                raise(Errc::schema_violation, path_prefix + "noise_mag has negative or non-finite values");
            }
        }
        params.contour.f0.push_back(f0);
        params.contour.voicing.push_back(voicing);
        params.harmonic_env.push_back(std::move(env));
        params.noise_mag.push_back(std::move(mags));
        ++index;
    }

    validate(params);
    return params;
}

inline void write_params(const SynthParams& params, const std::filesystem::path& path) {
    validate(params);
    nlohmann::json root;
    root["schema_version"] = kParamSchemaVersion;
    root["sample_rate"] = params.contour.sample_rate;
    root["hop"] = params.contour.hop;
    root["fft_size"] = params.fft_size;
    root["seed"] = params.seed;
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < params.frames(); ++i) {
        nlohmann::json frame;
        frame["f0"] = params.contour.f0[i];
        frame["voicing"] = params.contour.voicing[i];
        frame["harmonic_env"] = params.harmonic_env[i];
        frame["noise_mag"] = params.noise_mag[i];
        frames.push_back(std::move(frame));
    }
    root["frames"] = std::move(frames);

    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) raise(Errc::io_error, "cannot open " + path.string() + " for writing");
    stream << root.dump(1);
    if (!stream) raise(Errc::io_error, "short write to " + path.string());
}

} // namespace blepvox
