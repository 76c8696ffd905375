#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "plankit/audio.hpp"
#include "plankit/plan.hpp"

namespace plankit {

// Reference renderer. Not meant to sound good: it exists so that rendered
// audio has exactly known structure — per-bar envelopes that rise and fall
// inside the bar, noise that is reproducible per bar, and sample-exact bar
// concatenation. That makes it usable as ground truth in metric tests.

struct GrooveHit {
    enum class Instrument { Kick, Snare, Hat };

    double beat_offset = 0.0; // within a 4-beat cycle
    Instrument instrument = Instrument::Kick;
    double velocity = 1.0;
};

// Hit pattern over a 4-beat cycle; bars in other meters tile and clip it.
struct GrooveTemplate {
    Groove id = Groove::Backbeat;
    std::vector<GrooveHit> hits; // strictly increasing offsets, at least one
};

const GrooveTemplate& groove_template(Groove id);

// Hit times in beats for one bar of `beats` beats.
std::vector<GrooveHit> groove_hits_for_bar(Groove id, int beats);

struct RenderConfig {
    double sample_rate = kPipelineSampleRate;
    double master_gain = 0.6;
    // Bar gain per energy level; level 0 is silent by contract.
    std::array<double, kEnergyLevels> energy_amplitude = {0.0, 0.18, 0.30, 0.45, 0.65, 0.92};
    std::uint64_t seed = 0; // base seed for the per-bar noise streams
};

AudioBuffer render_plan(const StructuralPlan& plan, const RenderConfig& config = {});
AudioBuffer render_plan_serial(const StructuralPlan& plan, const RenderConfig& config = {});

// Accented click on each downbeat, plain clicks on the other beats.
AudioBuffer render_click(double bpm, int bars, Meter meter, const RenderConfig& config = {});

// Chord pitch frequencies for a harmony code: root-position triad (plus the
// seventh for dominant7) rooted in octave 3, 12-TET, A4 = 440 Hz.
std::vector<double> chord_frequencies(const HarmonyCode& chord);

// Pitch classes (0 = C) of the chord tones; used by chroma templates.
std::vector<int> chord_pitch_classes(const HarmonyCode& chord);

} // namespace plankit
