// Renders the two sign conventions for the pre-wrap residual term of the
// corrected sawtooth and measures the alias power of each. The shipped
// oscillator uses the convention this experiment selects; its output is
// committed as docs/polyblep_sign_experiment.csv.
//
// At f0 values whose period divides the sample rate with zero initial
// phase, every wrap lands exactly on a sample and the pre-wrap residual
// argument is exactly -1, where the residual vanishes; the two conventions
// then render identical buffers. A nonzero initial phase (and a couple of
// non-divisor f0 rows) keeps the comparison meaningful.

#include <iostream>
#include <string>
#include <vector>

#include "blepvox/analysis.hpp"
#include "blepvox/oscillator.hpp"

using namespace blepvox;

int main() {
    constexpr double sample_rate = 16000.0;
    constexpr std::size_t n_samples = 16000;

    struct Case {
        double f0;
        double initial_phase;
    };
    const std::vector<Case> cases = {{1000.0, 0.37}, {440.0, 0.0}, {777.0, 0.0}};

    std::cout << "variant,f0_hz,sample_rate_hz,initial_phase,alias_power,asr_db,selected\n";
    for (const Case& c : cases) {
        const std::vector<double> f0s(n_samples, c.f0);
        const PhaseTrack track = accumulate_phase(f0s, sample_rate, c.initial_phase);

        const AliasReport subtract =
            alias_report(polyblep_saw(track, PreWrapResidualSign::subtract), c.f0);
        const AliasReport add = alias_report(polyblep_saw(track, PreWrapResidualSign::add), c.f0);
        const bool subtract_wins = subtract.alias_power <= add.alias_power;

        const auto row = [&](const char* variant, const AliasReport& report, bool selected) {
            std::cout << variant << ',' << detail::fixed(c.f0, 6) << ','
                      << detail::fixed(sample_rate, 0) << ',' << detail::fixed(c.initial_phase, 6)
                      << ',' << detail::scientific(report.alias_power, 9) << ','
                      << detail::fixed(report.asr_db, 6) << ',' << (selected ? 1 : 0) << '\n';
        };
        row("subtract_pre_wrap", subtract, subtract_wins);
        row("add_pre_wrap", add, !subtract_wins);
    }
    return 0;
}
