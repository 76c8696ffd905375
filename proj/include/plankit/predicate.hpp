#pragma once

#include "plankit/plan.hpp"

namespace plankit {

// Binary constraint checked on the edited audio inside the edit region.
// Exactly the fields for its kind are meaningful; the rest are ignored.
struct Predicate {
    enum class Kind {
        EnergyUp,     // mean log-mel rises by >= delta_db relative to the original
        EnergyDown,   // symmetric drop
        Silence,      // mean mel level below threshold_db
        TempoSet,     // tempo estimates within target_bpm * (1 +- bpm_tolerance)
        GrooveMatch,  // onset envelope correlates with a groove template
        HarmonyMatch, // chroma correlates with a chord template
    };

    Kind kind = Kind::EnergyUp;

    double delta_db = 3.0;          // EnergyUp / EnergyDown
    double threshold_db = -60.0;    // Silence
    double target_bpm = 120.0;      // TempoSet
    double bpm_tolerance = 0.05;    // TempoSet, fractional
    Groove groove = Groove::Backbeat;            // GrooveMatch
    HarmonyCode chord;                           // HarmonyMatch
    double min_correlation = 0.25;  // GrooveMatch / HarmonyMatch

    bool operator==(const Predicate&) const = default;
};

const char* to_string(Predicate::Kind k);

} // namespace plankit
