#include "plankit/edit.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "plankit/error.hpp"

namespace plankit {

namespace {

enum class Field { Energy, Groove, Harmony, Tempo };

using WriteMap = std::map<std::pair<int, Field>, int>; // (bar, field) -> op index

void check_span(const BarSpan& span, int bar_count) {
    if (span.start < 1 || span.end < span.start || span.end > bar_count) {
        std::ostringstream os;
        os << "span " << span.start << ":" << span.end << " invalid for a "
           << bar_count << "-bar plan";
        throw DomainError("SpanOutOfRange", os.str());
    }
}

void record_writes(WriteMap& writes, const BarSpan& span, Field field, int op_index) {
    for (int bar = span.start; bar <= span.end; ++bar) {
        auto [it, inserted] = writes.emplace(std::pair{bar, field}, op_index);
        if (!inserted) {
            std::ostringstream os;
            os << "ops " << it->second + 1 << " and " << op_index + 1
               << " both write bar " << bar;
            throw DomainError("ConflictingOps", os.str());
        }
    }
}

void shift_after_insert(WriteMap& writes, std::vector<BarSpan>& touched,
                        int insert_pos, int count) {
    WriteMap shifted;
    for (const auto& [key, op] : writes) {
        auto [bar, field] = key;
        shifted.emplace(std::pair{bar > insert_pos ? bar + count : bar, field}, op);
    }
    writes = std::move(shifted);
    for (BarSpan& span : touched) {
        if (span.start > insert_pos) span.start += count;
        if (span.end >= insert_pos) span.end += count;
    }
}

void check_harmony_payload(const std::optional<HarmonyCode>& h) {
    if (!h) return;
    if (h->key.tonic < 0 || h->key.tonic > 11 || h->degree < 1 ||
        h->degree > kDegreeCount || static_cast<int>(h->quality) >= kQualityCount) {
        throw DomainError("InvalidPayload", "harmony payload outside vocabulary");
    }
}

} // namespace

const char* to_string(EditOp::Kind k) {
    switch (k) {
        case EditOp::Kind::SetEnergy: return "set_energy";
        case EditOp::Kind::SwapGroove: return "swap_groove";
        case EditOp::Kind::SetHarmony: return "set_harmony";
        case EditOp::Kind::Retempo: return "retempo";
        case EditOp::Kind::ExtendSection: return "extend_section";
        case EditOp::Kind::Mute: return "mute";
    }
    return "?";
}

const char* to_string(Predicate::Kind k) {
    switch (k) {
        case Predicate::Kind::EnergyUp: return "energy_up";
        case Predicate::Kind::EnergyDown: return "energy_down";
        case Predicate::Kind::Silence: return "silence";
        case Predicate::Kind::TempoSet: return "tempo_set";
        case Predicate::Kind::GrooveMatch: return "groove_match";
        case Predicate::Kind::HarmonyMatch: return "harmony_match";
    }
    return "?";
}

EditApplication apply_edit_detailed(const StructuralPlan& plan, const EditSpec& spec,
                                    double beta_max) {
    require_valid(plan, beta_max);
    if (spec.ops.empty()) {
        throw DomainError("EmptySpec", "edit spec has no ops");
    }

    EditApplication result;
    result.plan = plan;
    WriteMap writes;

    for (size_t i = 0; i < spec.ops.size(); ++i) {
        const EditOp& op = spec.ops[i];
        StructuralPlan& cur = result.plan;
        switch (op.kind) {
            case EditOp::Kind::SetEnergy: {
                check_span(op.span, cur.bar_count());
                if (op.energy < kEnergyMin || op.energy > kEnergyMax) {
                    throw DomainError("InvalidPayload", "energy level outside vocabulary");
                }
                record_writes(writes, op.span, Field::Energy, static_cast<int>(i));
                for (int bar = op.span.start; bar <= op.span.end; ++bar) {
                    cur.bars[bar - 1].energy = op.energy;
                }
                result.touched_spans.push_back(op.span);
                break;
            }
            case EditOp::Kind::Mute: {
                check_span(op.span, cur.bar_count());
                record_writes(writes, op.span, Field::Energy, static_cast<int>(i));
                for (int bar = op.span.start; bar <= op.span.end; ++bar) {
                    cur.bars[bar - 1].energy = 0;
                }
                result.touched_spans.push_back(op.span);
                break;
            }
            case EditOp::Kind::SwapGroove: {
                check_span(op.span, cur.bar_count());
                if (static_cast<int>(op.groove) >= kGrooveCount) {
                    throw DomainError("InvalidPayload", "groove outside vocabulary");
                }
                record_writes(writes, op.span, Field::Groove, static_cast<int>(i));
                for (int bar = op.span.start; bar <= op.span.end; ++bar) {
                    cur.bars[bar - 1].groove = op.groove;
                }
                result.touched_spans.push_back(op.span);
                break;
            }
            case EditOp::Kind::SetHarmony: {
                check_span(op.span, cur.bar_count());
                check_harmony_payload(op.harmony);
                record_writes(writes, op.span, Field::Harmony, static_cast<int>(i));
                for (int bar = op.span.start; bar <= op.span.end; ++bar) {
                    cur.bars[bar - 1].harmony = op.harmony;
                }
                result.touched_spans.push_back(op.span);
                break;
            }
            case EditOp::Kind::Retempo: {
                check_span(op.span, cur.bar_count());
                if (!std::isfinite(op.bpm) || op.bpm <= 0.0 || op.bpm > beta_max) {
                    throw DomainError("InvalidPayload", "tempo outside (0, beta_max]");
                }
                record_writes(writes, op.span, Field::Tempo, static_cast<int>(i));
                for (int bar = op.span.start; bar <= op.span.end; ++bar) {
                    cur.grid.bpm[bar - 1] = op.bpm;
                }
                result.touched_spans.push_back(op.span);
                break;
            }
            case EditOp::Kind::ExtendSection: {
                if (op.bar_count < 1) {
                    throw DomainError("InvalidPayload", "extend_section needs bar_count >= 1");
                }
                const std::vector<SectionSpan> spans = section_spans(cur);
                if (op.section_span < 1 || op.section_span > static_cast<int>(spans.size())) {
                    std::ostringstream os;
                    os << "section span " << op.section_span << " invalid, plan has "
                       << spans.size() << " spans";
                    throw DomainError("SpanOutOfRange", os.str());
                }
                const int insert_pos = spans[op.section_span - 1].last_bar;
                const BarAttributes clone_attrs = cur.bars[insert_pos - 1];
                const double clone_bpm = cur.grid.bpm[insert_pos - 1];
                cur.bars.insert(cur.bars.begin() + insert_pos, op.bar_count, clone_attrs);
                cur.grid.bpm.insert(cur.grid.bpm.begin() + insert_pos, op.bar_count,
                                    clone_bpm);
                shift_after_insert(writes, result.touched_spans, insert_pos, op.bar_count);
                result.touched_spans.push_back({insert_pos + 1, insert_pos + op.bar_count});
                break;
            }
        }
    }
    return result;
}

StructuralPlan apply_edit(const StructuralPlan& plan, const EditSpec& spec,
                          double beta_max) {
    return apply_edit_detailed(plan, spec, beta_max).plan;
}

std::vector<int> span_frames(const StructuralPlan& plan, const std::vector<BarSpan>& spans,
                             const FrameSpec& frame_spec, int window_samples,
                             bool contained) {
    require_valid(plan);
    const int frames =
        frame_spec.frame_count ? *frame_spec.frame_count : default_frame_count(plan, frame_spec);
    const double window =
        (window_samples > 0 ? window_samples : frame_spec.hop) / frame_spec.sample_rate;

    const std::vector<double> downbeats = downbeat_times(plan.grid);
    std::vector<bool> in_region(frames, false);
    for (const BarSpan& span : spans) {
        check_span(span, plan.bar_count());
        const double begin = downbeats[span.start - 1];
        const double end = (span.end < plan.bar_count())
                               ? downbeats[span.end]
                               : total_duration(plan);
        for (int j = 0; j < frames; ++j) {
            const double u = j * frame_spec.hop / frame_spec.sample_rate;
            const bool inside = contained ? (u >= begin && u + window <= end)
                                          : (u < end && u + window > begin);
            if (inside) in_region[j] = true;
        }
    }

    std::vector<int> region;
    for (int j = 0; j < frames; ++j) {
        if (in_region[j]) region.push_back(j);
    }
    return region;
}

std::vector<BarSpan> edit_spans(const StructuralPlan& plan, const EditSpec& spec) {
    if (spec.ops.empty()) {
        throw DomainError("EmptySpec", "edit spec has no ops");
    }
    std::vector<BarSpan> spans;
    for (const EditOp& op : spec.ops) {
        if (op.kind == EditOp::Kind::ExtendSection) {
            const std::vector<SectionSpan> sections = section_spans(plan);
            if (op.section_span < 1 || op.section_span > static_cast<int>(sections.size())) {
                throw DomainError("SpanOutOfRange", "section span index invalid");
            }
            const SectionSpan& s = sections[op.section_span - 1];
            spans.push_back({std::max(s.first_bar, s.last_bar - op.bar_count + 1), s.last_bar});
        } else {
            spans.push_back(op.span);
        }
    }
    return spans;
}

std::vector<int> edit_region_frames(const StructuralPlan& plan, const EditSpec& spec,
                                    const FrameSpec& frame_spec, int window_samples) {
    return span_frames(plan, edit_spans(plan, spec), frame_spec, window_samples);
}

} // namespace plankit
