// Unit tests for the phase accumulator and the sawtooth oscillators.

#include <blepvox/oscillator.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace blepvox;
using Catch::Approx;

namespace {

PhaseTrack constant_track(double f0, double sample_rate, std::size_t n, double phase0 = 0.0) {
    const std::vector<double> f0s(n, f0);
    return accumulate_phase(f0s, sample_rate, phase0);
}

double max_abs_first_difference(const AudioBuffer& x) {
    double peak = 0.0;
    for (std::size_t n = 1; n < x.size(); ++n) {
        peak = std::max(peak, std::abs(static_cast<double>(x.samples[n]) - x.samples[n - 1]));
    }
    return peak;
}

} // namespace

TEST_CASE("accumulate_phase: quarter-increment trajectory", "[oscillator]") {
    const std::vector<double> f0s(5, 4000.0);
    const PhaseTrack track = accumulate_phase(f0s, 16000.0, 0.0);
    const std::vector<double> expected = {0.0, 0.25, 0.5, 0.75, 0.0};
    REQUIRE(track.phase.size() == 5);
    for (std::size_t n = 0; n < 5; ++n) {
        CHECK(track.phase[n] == expected[n]);
        CHECK(track.increment[n] == 0.25);
    }
}

TEST_CASE("accumulate_phase: zero f0 holds the initial phase", "[oscillator]") {
    const std::vector<double> f0s(8, 0.0);
    const PhaseTrack track = accumulate_phase(f0s, 16000.0, 0.3);
    for (double p : track.phase) CHECK(p == 0.3);
}

TEST_CASE("accumulate_phase: wrap count equals floor of accumulated increments", "[oscillator]") {
    const std::size_t n = 16000;
    const PhaseTrack track = constant_track(200.0, 16000.0, n);

    // Independent count: the phase recurrence wraps exactly floor(sum of
    // applied increments) times. phase[0] carries no increment, so 15999
    // steps of 1/80 accumulate to 199.9875 and the track wraps 199 times.
    double accumulated = 0.0;
    for (std::size_t i = 1; i < n; ++i) accumulated += track.increment[i];
    const auto expected = static_cast<std::size_t>(std::floor(accumulated));

    std::size_t wraps = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (track.phase[i] < track.phase[i - 1]) ++wraps;
    }
    CHECK(expected == 199);
    CHECK(wraps == expected);
}

TEST_CASE("accumulate_phase: phase containment under abrupt f0 jumps", "[oscillator][property]") {
    std::mt19937 gen(1234);
    std::uniform_real_distribution<double> f0_dist(0.0, 8000.0);
    std::vector<double> f0s(4096);
    for (auto& f : f0s) f = f0_dist(gen);
    f0s[100] = 8000.0; // Nyquist edge
    f0s[101] = 0.0;

    const PhaseTrack track = accumulate_phase(f0s, 16000.0, 0.9999);
    for (std::size_t n = 0; n < track.size(); ++n) {
        REQUIRE(track.phase[n] >= 0.0);
        REQUIRE(track.phase[n] < 1.0);
        REQUIRE(track.increment[n] >= 0.0);
        REQUIRE(track.increment[n] <= 0.5);
    }
}

TEST_CASE("accumulate_phase: rejects bad input", "[oscillator][errors]") {
    const std::vector<double> ok = {100.0};
    const std::vector<double> negative = {-1.0};
    const std::vector<double> hot = {9000.0};

    const auto code_of = [](auto&& fn) {
        try {
            fn();
            FAIL("expected an Error");
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::io_error; // unreachable
    };

    CHECK(code_of([&] { accumulate_phase(negative, 16000.0); }) == Errc::negative_f0);
    CHECK(code_of([&] { accumulate_phase(hot, 16000.0); }) == Errc::above_nyquist);
    CHECK(code_of([&] { accumulate_phase(ok, 0.0); }) == Errc::bad_sample_rate);
    CHECK(code_of([&] { accumulate_phase(ok, -1.0); }) == Errc::bad_sample_rate);
    CHECK(code_of([&] { accumulate_phase(ok, 16000.0, 1.0); }) == Errc::out_of_range);
}

TEST_CASE("naive_saw: direct substitution", "[oscillator]") {
    PhaseTrack track;
    track.sample_rate = 16000.0;
    track.phase = {0.0, 0.25, 0.5, 0.75};
    track.increment = {0.25, 0.25, 0.25, 0.25};
    const AudioBuffer saw = naive_saw(track);
    const std::vector<float> expected = {-1.0f, -0.5f, 0.0f, 0.5f};
    for (std::size_t n = 0; n < 4; ++n) CHECK(saw.samples[n] == expected[n]);

    track.phase = {0.5, 0.5, 0.5};
    track.increment = {0.0, 0.0, 0.0};
    for (float s : naive_saw(track).samples) CHECK(s == 0.0f);
}

TEST_CASE("naive_saw: wrap jump is 2 - 2*increment", "[oscillator]") {
    const AudioBuffer saw = naive_saw(constant_track(1000.0, 16000.0, 16000));
    CHECK(max_abs_first_difference(saw) == Approx(2.0 - 2.0 / 16.0).margin(1e-9));
}

TEST_CASE("polyblep_residual: branch values", "[oscillator]") {
    CHECK(polyblep_residual(0.0) == -1.0);
    CHECK(polyblep_residual(-0.5) == 0.25);
    CHECK(polyblep_residual(-1.0) == 0.0);
    CHECK(polyblep_residual(std::nextafter(1.0, 0.0)) == Approx(0.0).margin(1e-15));
    CHECK(polyblep_residual(1.0) == 0.0);
    CHECK(polyblep_residual(1.5) == 0.0);
    CHECK(polyblep_residual(-1.5) == 0.0);
    CHECK(polyblep_residual(0.5) == 0.25);
}

TEST_CASE("polyblep_residual: rejects non-finite arguments", "[oscillator][errors]") {
    CHECK_THROWS_AS(polyblep_residual(std::nan("")), Error);
    CHECK_THROWS_AS(polyblep_residual(INFINITY), Error);
}

TEST_CASE("polyblep_saw: identical to naive away from wraps", "[oscillator]") {
    PhaseTrack track;
    track.sample_rate = 16000.0;
    track.phase = {0.5};
    track.increment = {0.01};
    CHECK(polyblep_saw(track).samples[0] == 0.0f);
    CHECK(polyblep_saw(track).samples[0] == naive_saw(track).samples[0]);
}

TEST_CASE("polyblep_saw: bit-exact passthrough outside residual support",
          "[oscillator][property]") {
    std::mt19937 gen(77);
    std::uniform_real_distribution<double> f0_dist(50.0, 4000.0);
    std::vector<double> f0s(8192);
    for (auto& f : f0s) f = f0_dist(gen);

    const PhaseTrack track = accumulate_phase(f0s, 16000.0, 0.0);
    const AudioBuffer blep = polyblep_saw(track);
    const AudioBuffer naive = naive_saw(track);
    std::size_t checked = 0;
    for (std::size_t n = 0; n < track.size(); ++n) {
        const double inc = track.increment[n];
        if (inc <= 0.0) continue;
        const double post = track.phase[n] / inc;
        const double pre = (track.phase[n] - 1.0) / inc;
        const bool outside = (post >= 1.0 || post < -1.0) && (pre >= 1.0 || pre < -1.0);
        if (outside) {
            REQUIRE(blep.samples[n] == naive.samples[n]);
            ++checked;
        }
    }
    REQUIRE(checked > 4000); // most samples sit away from a wrap
}

TEST_CASE("polyblep_saw: zero-increment samples pass through as naive", "[oscillator]") {
    std::vector<double> f0s(64, 0.0);
    f0s[0] = 0.0;
    const PhaseTrack track = accumulate_phase(f0s, 16000.0, 0.125);
    const AudioBuffer blep = polyblep_saw(track);
    const AudioBuffer naive = naive_saw(track);
    for (std::size_t n = 0; n < track.size(); ++n) {
        CHECK(blep.samples[n] == naive.samples[n]);
        CHECK(blep.samples[n] == -0.75f);
    }
}

TEST_CASE("polyblep_saw: wrap transition is materially smoother", "[oscillator]") {
    const PhaseTrack track = constant_track(1000.0, 16000.0, 16000);
    const double naive_step = max_abs_first_difference(naive_saw(track));
    const double blep_step = max_abs_first_difference(polyblep_saw(track));
    CHECK(blep_step < 0.55 * naive_step);
}

TEST_CASE("polyblep_saw: wrap smoothing for increments below 1/4", "[oscillator][property]") {
    for (double f0 : {123.4, 440.0, 999.9, 2345.0, 3900.0}) {
        const PhaseTrack track = constant_track(f0, 16000.0, 16000, 0.11);
        const double naive_step = max_abs_first_difference(naive_saw(track));
        const double blep_step = max_abs_first_difference(polyblep_saw(track));
        INFO("f0 = " << f0);
        CHECK(blep_step < naive_step);
    }
}

TEST_CASE("polyblep_saw: finite differences along f0 converge where branches are stable",
          "[oscillator][property]") {
    const double sample_rate = 16000.0;
    const std::size_t n_samples = 2048;
    const double f0 = 217.3;
    const double h = 0.01;

    const auto sample_at = [&](double f, std::size_t n) {
        return static_cast<double>(polyblep_saw(constant_track(f, sample_rate, n_samples)).samples[n]);
    };
    const auto branch_state = [&](double f, std::size_t n) {
        const PhaseTrack track = constant_track(f, sample_rate, n_samples);
        const double post = track.phase[n] / track.increment[n];
        const double pre = (track.phase[n] - 1.0) / track.increment[n];
        if (post >= 1.0 && (pre < -1.0)) return 0;           // outside support
        if (post > 0.05 && post < 0.95) return 1;            // interior, post-wrap branch
        if (pre > -0.95 && pre < -0.05) return 2;            // interior, pre-wrap branch
        return -1;                                           // near a branch edge
    };

    std::size_t tested = 0;
    for (std::size_t n = 100; n < n_samples && tested < 8; n += 37) {
        const int state = branch_state(f0, n);
        if (state < 0) continue;
        bool stable = true;
        for (double f : {f0 - h, f0 + h, f0 - h / 2, f0 + h / 2}) {
            if (branch_state(f, n) != state) stable = false;
        }
        if (!stable) continue;

        const double fd_h = (sample_at(f0 + h, n) - sample_at(f0 - h, n)) / (2.0 * h);
        const double fd_half = (sample_at(f0 + h / 2, n) - sample_at(f0 - h / 2, n)) / h;
        if (std::abs(fd_half) < 1e-6) continue; // flat direction, ratio meaningless
        INFO("sample " << n << " state " << state);
        CHECK(std::abs(fd_h - fd_half) / std::abs(fd_half) < 0.01);
        ++tested;
    }
    REQUIRE(tested >= 4);
}

TEST_CASE("polyblep_saw: pre-wrap sign conventions differ where wraps fall mid-sample",
          "[oscillator]") {
    const PhaseTrack track = constant_track(1000.0, 16000.0, 4096, 0.37);
    const AudioBuffer subtract = polyblep_saw(track, PreWrapResidualSign::subtract);
    const AudioBuffer add = polyblep_saw(track, PreWrapResidualSign::add);
    const AudioBuffer shipped = polyblep_saw(track);

    bool differ = false;
    for (std::size_t n = 0; n < track.size(); ++n) {
        REQUIRE(shipped.samples[n] == subtract.samples[n]);
        if (subtract.samples[n] != add.samples[n]) differ = true;
    }
    CHECK(differ);
}
