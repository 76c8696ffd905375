#pragma once

#include <string>
#include <vector>

#include "plankit/audio.hpp"
#include "plankit/edit.hpp"
#include "plankit/mel.hpp"
#include "plankit/predicate.hpp"

namespace plankit {

struct PredicateResult {
    Predicate::Kind kind = Predicate::Kind::EnergyUp;
    bool passed = false;
};

struct EfsReport {
    double p = 0.0;         // fraction of constraints satisfied
    double delta_in = 0.0;  // L1 log-mel change inside the edit region
    double delta_out = 0.0; // L1 log-mel change outside it
    double r = 0.0;         // delta_in / (delta_in + delta_out), 0 on no change
    double alpha = 0.5;
    double total = 0.0;     // 100 * (alpha * p + (1 - alpha) * r)
    std::vector<PredicateResult> predicates;
    std::vector<std::string> flags;
};

// Pure aggregation: localization ratio plus the blended total. The 0/0 case
// defines r = 0 and reports no_change.
struct EfsBreakdown {
    double r = 0.0;
    bool no_change = false;
    double total = 0.0;
};

EfsBreakdown efs_total(double p, double delta_in, double delta_out, double alpha);

// Scores how well `edited` realizes the edit relative to `original`:
// predicate satisfaction inside the edit region plus change localization.
// Both buffers must have the same sample rate and produce the same number of
// mel frames; compare duration-changing edits over equal-length windows.
EfsReport efs(const AudioBuffer& original, const AudioBuffer& edited, const EditSpec& spec,
              const StructuralPlan& edited_plan, double alpha = 0.5,
              const MelParams& mel_params = {});

// One constraint on its own. `region` holds the 0-based mel frame indices of
// the edit region. Throws RegionTooShort for tempo/groove checks on regions
// under two bars.
bool evaluate_predicate(const Predicate& pred, const AudioBuffer& edited,
                        const AudioBuffer& original, const std::vector<int>& region,
                        const StructuralPlan& edited_plan,
                        const MelParams& mel_params = {});

} // namespace plankit
