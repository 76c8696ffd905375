#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "plankit/audio.hpp"
#include "plankit/plan.hpp"

namespace plankit::testing {

// Uniform-tempo plan with a simple section layout, useful as a base fixture.
inline StructuralPlan make_plan(int bars, double bpm = 120.0, Meter meter = {4, 4}) {
    StructuralPlan plan;
    plan.grid.meter = meter;
    plan.grid.bpm.assign(bars, bpm);
    plan.bars.resize(bars);
    for (int i = 0; i < bars; ++i) {
        BarAttributes& a = plan.bars[i];
        a.section = (i < bars / 2) ? Section::Verse : Section::Chorus;
        a.energy = 3;
        a.groove = Groove::Backbeat;
        a.harmony = HarmonyCode{{0, Mode::Major}, 1, ChordQuality::Major};
    }
    return plan;
}

inline StructuralPlan random_plan(std::mt19937& rng, int min_bars = 2, int max_bars = 20) {
    std::uniform_int_distribution<int> bar_dist(min_bars, max_bars);
    std::uniform_real_distribution<double> bpm_dist(48.0, 240.0);
    std::uniform_int_distribution<int> meter_pick(0, 3);
    std::uniform_int_distribution<int> section_pick(0, kSectionCount - 1);
    std::uniform_int_distribution<int> energy_pick(1, 5);
    std::uniform_int_distribution<int> groove_pick(0, kGrooveCount - 1);
    std::uniform_int_distribution<int> run_len(1, 6);
    std::uniform_int_distribution<int> tonic_pick(0, 11);
    std::uniform_int_distribution<int> degree_pick(1, 7);
    std::uniform_int_distribution<int> quality_pick(0, kQualityCount - 1);
    std::bernoulli_distribution has_harmony(0.8);
    std::bernoulli_distribution minor(0.5);

    static const Meter meters[] = {{4, 4}, {3, 4}, {6, 8}, {2, 2}};
    const int bars = bar_dist(rng);

    StructuralPlan plan;
    plan.grid.meter = meters[meter_pick(rng)];
    plan.grid.bpm.resize(bars);
    for (double& b : plan.grid.bpm) b = bpm_dist(rng);

    plan.bars.resize(bars);
    int i = 0;
    while (i < bars) {
        const Section section = static_cast<Section>(section_pick(rng));
        const int run = std::min(run_len(rng), bars - i);
        for (int k = 0; k < run; ++k, ++i) {
            BarAttributes& a = plan.bars[i];
            a.section = section;
            a.energy = energy_pick(rng);
            a.groove = static_cast<Groove>(groove_pick(rng));
            if (has_harmony(rng)) {
                a.harmony = HarmonyCode{
                    {tonic_pick(rng), minor(rng) ? Mode::Minor : Mode::Major},
                    degree_pick(rng),
                    static_cast<ChordQuality>(quality_pick(rng)),
                };
            } else {
                a.harmony.reset();
            }
        }
    }
    return plan;
}

inline AudioBuffer sine_wave(double freq, double seconds, double amplitude = 1.0,
                             double sample_rate = kPipelineSampleRate) {
    AudioBuffer out;
    out.sample_rate = sample_rate;
    const long n = std::lround(seconds * sample_rate);
    out.samples.resize(n);
    for (long i = 0; i < n; ++i) {
        out.samples[i] = static_cast<float>(
            amplitude * std::sin(2.0 * std::numbers::pi * freq * i / sample_rate));
    }
    return out;
}

inline AudioBuffer white_noise(double seconds, std::mt19937& rng, double amplitude = 0.5,
                               double sample_rate = kPipelineSampleRate) {
    AudioBuffer out;
    out.sample_rate = sample_rate;
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    const long n = std::lround(seconds * sample_rate);
    out.samples.resize(n);
    for (long i = 0; i < n; ++i) out.samples[i] = static_cast<float>(dist(rng));
    return out;
}

} // namespace plankit::testing
