// Command-line front end: render parameter files to WAV, measure aliasing,
// compare oscillators, evaluate losses, and generate test fixtures.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blepvox/blepvox.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int exit_code_for(const blepvox::Error& error) {
    return blepvox::is_validation_error(error.code()) ? kExitValidation : kExitIo;
}

struct ContourFile {
    std::vector<double> f0;
    std::vector<double> voicing;
    bool has_f0 = false;
    bool has_voicing = false;
};

/// Contour files are JSON objects with optional "f0" and "voicing" arrays.
ContourFile read_contour(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) blepvox::raise(blepvox::Errc::not_found, "cannot open " + path.string());
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(stream);
    } catch (const nlohmann::json::exception& e) {
        blepvox::raise(blepvox::Errc::schema_violation,
                       path.string() + ": invalid JSON: " + e.what());
    }
    if (!root.is_object()) {
        blepvox::raise(blepvox::Errc::schema_violation, path.string() + ": expected an object");
    }
    ContourFile contour;
    const auto load = [&](const char* key, std::vector<double>& out) {
        const auto it = root.find(key);
        if (it == root.end()) return false;
        if (!it->is_array()) {
            blepvox::raise(blepvox::Errc::schema_violation,
                           path.string() + ": " + key + " must be an array");
        }
        for (const auto& v : *it) {
            if (!v.is_number()) {
                blepvox::raise(blepvox::Errc::schema_violation,
                               path.string() + ": " + key + " must hold numbers");
            }
            out.push_back(v.get<double>());
        }
        return true;
    };
    contour.has_f0 = load("f0", contour.f0);
    contour.has_voicing = load("voicing", contour.voicing);
    return contour;
}

std::vector<bool> voiced_labels(const ContourFile& contour) {
    std::vector<bool> voiced;
    if (contour.has_voicing) {
        voiced.reserve(contour.voicing.size());
        for (double v : contour.voicing) voiced.push_back(v >= 0.5);
    } else {
        voiced.reserve(contour.f0.size());
        for (double f : contour.f0) voiced.push_back(f > 0.0);
    }
    return voiced;
}

int cmd_render(const std::string& params_path, const std::string& out_wav,
               const std::string& oscillator, std::optional<std::uint64_t> seed_override) {
    blepvox::SynthParams params = blepvox::read_params(params_path);
    if (seed_override) params.seed = *seed_override;
    const auto kind = oscillator == "naive" ? blepvox::OscillatorKind::naive
                                            : blepvox::OscillatorKind::polyblep;
    const blepvox::AudioBuffer rendered = blepvox::synthesize(params, kind);
    blepvox::write_wav(rendered, out_wav, blepvox::WavFormat::float32);
    std::cout << "oscillator: " << oscillator << "\n"
              << "frames: " << params.frames() << "\n"
              << "duration: " << blepvox::detail::fixed(rendered.duration_seconds(), 6) << " s\n"
              << "wrote: " << out_wav << "\n";
    return 0;
}

int cmd_analyze_alias(const std::string& in_wav, double f0, const std::string& csv_path) {
    const blepvox::AudioBuffer buffer = blepvox::read_wav(in_wav);
    const blepvox::AliasReport report = blepvox::alias_report(buffer, f0);

    const std::string f0_text = blepvox::detail::fixed(report.f0, 6);
    const std::string harmonic_text = blepvox::detail::scientific(report.harmonic_power, 9);
    const std::string alias_text = blepvox::detail::scientific(report.alias_power, 9);
    const std::string asr_text = blepvox::detail::fixed(report.asr_db, 6);

    std::cout << "f0_hz: " << f0_text << "\n"
              << "n_harmonics: " << report.n_harmonics << "\n"
              << "harmonic_power: " << harmonic_text << "\n"
              << "alias_power: " << alias_text << "\n"
              << "asr_db: " << asr_text << "\n";

    if (!csv_path.empty()) {
        const bool fresh = !std::filesystem::exists(csv_path) ||
                           std::filesystem::file_size(csv_path) == 0;
        std::ofstream csv(csv_path, std::ios::app);
        if (!csv) blepvox::raise(blepvox::Errc::io_error, "cannot open " + csv_path);
        if (fresh) csv << "f0_hz,harmonic_power,alias_power,asr_db\n";
        csv << f0_text << ',' << harmonic_text << ',' << alias_text << ',' << asr_text << '\n';
        if (!csv) blepvox::raise(blepvox::Errc::io_error, "short write to " + csv_path);
    }
    return 0;
}

int cmd_compare_osc(const std::vector<double>& f0_list, double sample_rate, double duration,
                    const std::string& csv_path) {
    if (f0_list.empty()) {
        blepvox::raise(blepvox::Errc::empty_input, "f0 list must not be empty");
    }
    const auto rows = blepvox::compare_oscillators(f0_list, sample_rate, duration);
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) blepvox::raise(blepvox::Errc::io_error, "cannot open " + csv_path);
    csv << blepvox::comparison_csv(rows);
    if (!csv) blepvox::raise(blepvox::Errc::io_error, "short write to " + csv_path);

    for (const auto& row : rows) {
        std::cout << "f0=" << blepvox::detail::fixed(row.f0, 1)
                  << " Hz  asr_naive=" << blepvox::detail::fixed(row.asr_naive_db, 2)
                  << " dB  asr_polyblep=" << blepvox::detail::fixed(row.asr_polyblep_db, 2)
                  << " dB  delta=" << blepvox::detail::fixed(row.asr_delta_db, 2)
                  << " dB  lsd_naive=" << blepvox::detail::fixed(row.lsd_naive, 4)
                  << "  lsd_polyblep=" << blepvox::detail::fixed(row.lsd_polyblep, 4) << "\n";
    }
    std::cout << "wrote: " << csv_path << "\n";
    return 0;
}

int cmd_loss(const std::string& ref_wav, const std::string& est_wav,
             const std::string& f0_ref_path, const std::string& f0_est_path,
             const std::string& v_est_path) {
    const blepvox::AudioBuffer ref = blepvox::read_wav(ref_wav);
    const blepvox::AudioBuffer est = blepvox::read_wav(est_wav);

    blepvox::LossReport report;
    const blepvox::StftSet set = blepvox::StftSet::defaults();
    report.per_scale = blepvox::spectral_loss_terms(ref, est, set);
    for (double term : report.per_scale) report.spectral += term;
    std::cout << "L_spec: " << blepvox::detail::fixed(report.spectral, 6) << "\n";

    std::optional<ContourFile> ref_contour;
    if (!f0_ref_path.empty()) ref_contour = read_contour(f0_ref_path);

    if (ref_contour && !f0_est_path.empty()) {
        const ContourFile est_contour = read_contour(f0_est_path);
        if (!ref_contour->has_f0 || !est_contour.has_f0) {
            blepvox::raise(blepvox::Errc::schema_violation, "contour files must provide f0");
        }
        const auto result =
            blepvox::f0_loss(est_contour.f0, ref_contour->f0, voiced_labels(*ref_contour));
        report.f0 = result.value;
        report.f0_no_voiced_frames = result.no_voiced_frames;
        std::cout << "L_F0: " << blepvox::detail::fixed(report.f0, 6) << "\n";
        if (result.no_voiced_frames) {
            std::cerr << "note: reference contour has no voiced frames\n";
        }
    }

    if (ref_contour && !v_est_path.empty()) {
        const ContourFile est_contour = read_contour(v_est_path);
        if (!est_contour.has_voicing) {
            blepvox::raise(blepvox::Errc::schema_violation,
                           v_est_path + " must provide a voicing array");
        }
        const std::vector<bool> labels = voiced_labels(*ref_contour);
        std::vector<double> binary(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] ? 1.0 : 0.0;
        report.voicing = blepvox::voicing_bce(est_contour.voicing, binary);
        std::cout << "L_voiced: " << blepvox::detail::fixed(report.voicing, 6) << "\n";
    }
    return 0;
}

int cmd_gen_params(std::optional<double> f0_const, const std::string& sweep_spec, double duration,
                   double sample_rate, std::size_t hop, std::size_t fft_size, double env_value,
                   double noise_value, const std::string& voicing_pattern, std::size_t block,
                   std::uint64_t seed, const std::string& out_path) {
    if (f0_const.has_value() == !sweep_spec.empty()) {
        blepvox::raise(blepvox::Errc::out_of_range, "give exactly one of --f0 or --sweep");
    }
    double sweep_begin = 0.0, sweep_end = 0.0;
    if (!sweep_spec.empty()) {
        const auto colon = sweep_spec.find(':');
        if (colon == std::string::npos) {
            blepvox::raise(blepvox::Errc::out_of_range, "--sweep expects begin:end");
        }
        try {
            sweep_begin = std::stod(sweep_spec.substr(0, colon));
            sweep_end = std::stod(sweep_spec.substr(colon + 1));
        } catch (const std::exception&) {
            blepvox::raise(blepvox::Errc::out_of_range, "--sweep expects begin:end numbers");
        }
    }
    if (block < 1) blepvox::raise(blepvox::Errc::out_of_range, "--block must be at least 1");

    const std::size_t frames =
        static_cast<std::size_t>(std::floor(duration * sample_rate / static_cast<double>(hop)));
    if (frames < 1) {
        blepvox::raise(blepvox::Errc::out_of_range, "duration too short for a single frame");
    }

    blepvox::SynthParams params;
    params.contour.sample_rate = sample_rate;
    params.contour.hop = hop;
    params.fft_size = fft_size;
    params.seed = seed;
    const std::size_t bins = fft_size / 2 + 1;

    for (std::size_t i = 0; i < frames; ++i) {
        double f0 = f0_const ? *f0_const
                             : (frames == 1 ? sweep_begin
                                            : sweep_begin + (sweep_end - sweep_begin) *
                                                                static_cast<double>(i) /
                                                                static_cast<double>(frames - 1));
        double voicing = 1.0;
        if (voicing_pattern == "unvoiced") {
            voicing = 0.0;
        } else if (voicing_pattern == "alternating") {
            voicing = (i / block) % 2 == 0 ? 1.0 : 0.0;
        }
        if (voicing == 0.0) f0 = 0.0;
        params.contour.f0.push_back(f0);
        params.contour.voicing.push_back(voicing);
        params.harmonic_env.emplace_back(blepvox::kEnvelopePoints, env_value);
        params.noise_mag.emplace_back(bins, noise_value);
    }

    blepvox::write_params(params, out_path);
    std::cout << "frames: " << frames << "\n"
              << "wrote: " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"band-limited subtractive speech-excitation synthesis toolkit"};
    app.require_subcommand(1);

    // render
    auto* render = app.add_subcommand("render", "synthesize a parameter file to a float32 WAV");
    std::string render_params, render_out;
    std::string render_osc = "polyblep";
    std::uint64_t render_seed = 0;
    render->add_option("params", render_params, "parameter file (JSON)")->required();
    render->add_option("out", render_out, "output WAV path")->required();
    render->add_option("--oscillator", render_osc, "oscillator kind")
        ->check(CLI::IsMember({"naive", "polyblep"}));
    auto* seed_opt = render->add_option("--seed", render_seed, "override the file's noise seed");

    // analyze-alias
    auto* analyze = app.add_subcommand("analyze-alias", "harmonic/alias power split of a WAV");
    std::string analyze_wav, analyze_csv;
    double analyze_f0 = 0.0;
    analyze->add_option("wav", analyze_wav, "input WAV (mono, >= 0.5 s)")->required();
    analyze->add_option("--f0", analyze_f0, "fundamental frequency in Hz")->required();
    analyze->add_option("--csv", analyze_csv, "append a CSV row to this file");

    // compare-osc
    auto* compare = app.add_subcommand("compare-osc", "naive vs polyblep table against the oracle");
    std::string compare_list, compare_csv;
    double compare_rate = blepvox::kDefaultSampleRate;
    double compare_duration = 1.0;
    compare->add_option("--f0-list", compare_list, "comma-separated f0 values in Hz")->required();
    compare->add_option("--sample-rate", compare_rate, "sample rate in Hz");
    compare->add_option("--duration", compare_duration, "render duration in seconds");
    compare->add_option("--csv", compare_csv, "output CSV path")->required();

    // loss
    auto* loss = app.add_subcommand("loss", "loss components between two WAVs");
    std::string loss_ref, loss_est, loss_f0_ref, loss_f0_est, loss_v_est;
    loss->add_option("ref", loss_ref, "reference WAV")->required();
    loss->add_option("est", loss_est, "estimate WAV")->required();
    loss->add_option("--f0-ref", loss_f0_ref, "reference contour JSON");
    loss->add_option("--f0-est", loss_f0_est, "estimated contour JSON");
    loss->add_option("--v-est", loss_v_est, "estimated voicing JSON");

    // gen-params
    auto* gen = app.add_subcommand("gen-params", "write a synthesis parameter fixture");
    std::optional<double> gen_f0;
    std::string gen_sweep, gen_voicing = "voiced", gen_out;
    double gen_duration = 1.0, gen_rate = blepvox::kDefaultSampleRate;
    double gen_env = 1.0, gen_noise = 0.0;
    std::size_t gen_hop = blepvox::kDefaultHop, gen_fft = blepvox::kDefaultFftSize, gen_block = 8;
    std::uint64_t gen_seed = 0;
    gen->add_option("--f0", gen_f0, "constant f0 in Hz");
    gen->add_option("--sweep", gen_sweep, "linear f0 sweep begin:end in Hz");
    gen->add_option("--duration", gen_duration, "duration in seconds");
    gen->add_option("--sample-rate", gen_rate, "sample rate in Hz");
    gen->add_option("--hop", gen_hop, "samples per frame");
    gen->add_option("--fft", gen_fft, "noise fft size");
    gen->add_option("--env", gen_env, "flat harmonic envelope value");
    gen->add_option("--noise", gen_noise, "flat noise magnitude");
    gen->add_option("--voicing", gen_voicing, "voicing pattern")
        ->check(CLI::IsMember({"voiced", "unvoiced", "alternating"}));
    gen->add_option("--block", gen_block, "frames per alternating block");
    gen->add_option("--seed", gen_seed, "noise seed to store");
    gen->add_option("--out", gen_out, "output parameter file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (render->parsed()) {
            std::optional<std::uint64_t> seed;
            if (seed_opt->count() > 0) seed = render_seed;
            return cmd_render(render_params, render_out, render_osc, seed);
        }
        if (analyze->parsed()) {
            return cmd_analyze_alias(analyze_wav, analyze_f0, analyze_csv);
        }
        if (compare->parsed()) {
            std::vector<double> f0_list;
            std::stringstream stream(compare_list);
            std::string item;
            while (std::getline(stream, item, ',')) {
                if (item.empty()) continue;
                try {
                    f0_list.push_back(std::stod(item));
                } catch (const std::exception&) {
                    blepvox::raise(blepvox::Errc::out_of_range, "bad f0 '" + item + "'");
                }
            }
            return cmd_compare_osc(f0_list, compare_rate, compare_duration, compare_csv);
        }
        if (loss->parsed()) {
            return cmd_loss(loss_ref, loss_est, loss_f0_ref, loss_f0_est, loss_v_est);
        }
        if (gen->parsed()) {
            return cmd_gen_params(gen_f0, gen_sweep, gen_duration, gen_rate, gen_hop, gen_fft,
                                  gen_env, gen_noise, gen_voicing, gen_block, gen_seed, gen_out);
        }
    } catch (const blepvox::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
