#pragma once

#include <optional>
#include <vector>

#include "plankit/control.hpp"
#include "plankit/plan.hpp"
#include "plankit/predicate.hpp"

namespace plankit {

// Inclusive 1-indexed bar range.
struct BarSpan {
    int start = 1;
    int end = 1;

    int length() const { return end - start + 1; }
    bool contains(int bar) const { return bar >= start && bar <= end; }

    bool operator==(const BarSpan&) const = default;
};

struct EditOp {
    enum class Kind { SetEnergy, SwapGroove, SetHarmony, Retempo, ExtendSection, Mute };

    Kind kind = Kind::SetEnergy;
    BarSpan span; // unused for ExtendSection

    // Payload; only the field matching `kind` is read.
    int energy = 3;                     // SetEnergy
    Groove groove = Groove::Backbeat;   // SwapGroove
    std::optional<HarmonyCode> harmony; // SetHarmony (nullopt clears harmony)
    double bpm = 120.0;                 // Retempo
    int section_span = 1;               // ExtendSection, 1-indexed span number
    int bar_count = 1;                  // ExtendSection, bars to insert

    bool operator==(const EditOp&) const = default;
};

const char* to_string(EditOp::Kind k);

struct EditSpec {
    std::vector<EditOp> ops;            // must be non-empty
    std::vector<Predicate> constraints; // must be non-empty when scored

    bool operator==(const EditSpec&) const = default;
};

struct EditApplication {
    StructuralPlan plan;
    // Bar spans the ops touched, expressed on the edited plan's timeline.
    std::vector<BarSpan> touched_spans;
};

// Applies ops in listed order. Bars outside the touched spans are copied
// bit-identically. Two ops writing the same field of the same bar are an
// error, not last-write-wins.
EditApplication apply_edit_detailed(const StructuralPlan& plan, const EditSpec& spec,
                                    double beta_max = kBetaMax);
StructuralPlan apply_edit(const StructuralPlan& plan, const EditSpec& spec,
                          double beta_max = kBetaMax);

// Bar spans an edit spec targets, resolved against the given plan
// (extend_section maps to the last `bars` of its section span).
std::vector<BarSpan> edit_spans(const StructuralPlan& plan, const EditSpec& spec);

// Frame indices (0-based) whose analysis window overlaps any edited bar's
// time interval on the given plan's grid. `window_samples` is the number of
// samples one frame reads; 0 means one hop. Pass the STFT size to cover
// every frame whose transform can see edited samples.
std::vector<int> edit_region_frames(const StructuralPlan& plan, const EditSpec& spec,
                                    const FrameSpec& frame_spec, int window_samples = 0);

// Same, but for explicit spans (used once the edited spans are known).
// With `contained`, a frame counts only when its whole window lies inside a
// span; that is the right notion for judging the content of the region.
std::vector<int> span_frames(const StructuralPlan& plan, const std::vector<BarSpan>& spans,
                             const FrameSpec& frame_spec, int window_samples = 0,
                             bool contained = false);

} // namespace plankit
