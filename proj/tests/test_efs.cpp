#include <doctest.h>

#include <random>

#include "plankit/efs.hpp"
#include "plankit/error.hpp"
#include "plankit/synth.hpp"

#include "helpers.hpp"

using namespace plankit;
using plankit::testing::make_plan;

namespace {

EditSpec energy_edit(BarSpan span, int level, double delta_db = 3.0) {
    EditSpec spec;
    EditOp op;
    op.kind = EditOp::Kind::SetEnergy;
    op.span = span;
    op.energy = level;
    spec.ops.push_back(op);
    Predicate pred;
    pred.kind = Predicate::Kind::EnergyUp;
    pred.delta_db = delta_db;
    spec.constraints.push_back(pred);
    return spec;
}

} // namespace

TEST_SUITE("efs") {

TEST_CASE("blend arithmetic") {
    CHECK(efs_total(1.0, 5.0, 0.0, 0.5).total == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(efs_total(0.5, 5.0, 0.0, 0.5).total == doctest::Approx(75.0).epsilon(1e-12));
    CHECK(efs_total(1.0, 1.0, 3.0, 0.0).total == doctest::Approx(25.0).epsilon(1e-12));

    const EfsBreakdown zero = efs_total(1.0, 0.0, 0.0, 0.5);
    CHECK(zero.no_change);
    CHECK(zero.r == 0.0);
    CHECK(zero.total == doctest::Approx(50.0));

    // swapping the deltas mirrors the localization ratio
    std::mt19937 rng(107);
    std::uniform_real_distribution<double> d(0.01, 100.0);
    for (int i = 0; i < 200; ++i) {
        const double din = d(rng), dout = d(rng);
        const double r = efs_total(0.0, din, dout, 0.5).r;
        const double swapped = efs_total(0.0, dout, din, 0.5).r;
        REQUIRE(r + swapped == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
    }
}

TEST_CASE("oracle pair: energy edit is perfectly local") {
    StructuralPlan plan = make_plan(8);
    for (BarAttributes& bar : plan.bars) bar.energy = 2;
    const EditSpec spec = energy_edit({5, 8}, 5);
    const StructuralPlan edited_plan = apply_edit(plan, spec);

    const AudioBuffer before = render_plan(plan);
    const AudioBuffer after = render_plan(edited_plan);

    const EfsReport report = efs(before, after, spec, edited_plan);
    CHECK(report.delta_out == 0.0); // renders are bit-identical outside the span
    CHECK(report.delta_in > 0.0);
    CHECK(report.r == 1.0);
    CHECK(report.p == 1.0);
    CHECK(report.total == doctest::Approx(100.0));
    CHECK(report.flags.empty());
}

TEST_CASE("identical audio raises the NoChange flag") {
    const StructuralPlan plan = make_plan(8);
    const EditSpec spec = energy_edit({5, 8}, 5);
    const StructuralPlan edited_plan = apply_edit(plan, spec);
    const AudioBuffer audio = render_plan(plan);

    const EfsReport report = efs(audio, audio, spec, edited_plan);
    CHECK(report.r == 0.0);
    REQUIRE(report.flags.size() == 1);
    CHECK(report.flags[0] == "NoChange");
    CHECK(report.p == 0.0); // energy_up cannot pass when nothing rose
}

TEST_CASE("unequal lengths are an error, not a truncation") {
    const StructuralPlan plan = make_plan(8);
    const EditSpec spec = energy_edit({5, 8}, 5);
    const AudioBuffer full = render_plan(plan);
    AudioBuffer shorter = full;
    shorter.samples.resize(shorter.samples.size() - 24000);
    CHECK_THROWS_WITH_AS(efs(full, shorter, spec, plan), doctest::Contains("LengthMismatch"),
                         DomainError);
}

TEST_CASE("alpha and constraints are validated") {
    const StructuralPlan plan = make_plan(8);
    const AudioBuffer audio = render_plan(plan);
    EditSpec spec = energy_edit({5, 8}, 5);
    CHECK_THROWS_AS(efs(audio, audio, spec, plan, 1.5), DomainError);
    spec.constraints.clear();
    CHECK_THROWS_WITH_AS(efs(audio, audio, spec, plan), doctest::Contains("EmptySpec"),
                         DomainError);
}

TEST_CASE("r decays as out-of-region noise grows") {
    StructuralPlan plan = make_plan(8);
    for (BarAttributes& bar : plan.bars) bar.energy = 2;
    const EditSpec spec = energy_edit({5, 8}, 5);
    const StructuralPlan edited_plan = apply_edit(plan, spec);
    const AudioBuffer before = render_plan(plan);
    const AudioBuffer after = render_plan(edited_plan);

    std::mt19937 rng(109);
    std::uniform_real_distribution<float> noise(-1.0f, 1.0f);
    const long region_start = std::llround(downbeat_times(plan.grid)[4] * 24000.0);

    double previous_r = 1.1;
    for (double level : {0.0, 0.002, 0.01, 0.05}) {
        AudioBuffer perturbed = after;
        for (long i = 0; i < region_start; ++i) {
            perturbed.samples[i] += static_cast<float>(level) * noise(rng);
        }
        const EfsReport report = efs(before, perturbed, spec, edited_plan);
        REQUIRE(report.r < previous_r);
        previous_r = report.r;
    }
}

TEST_CASE("energy predicates react to direction") {
    StructuralPlan quiet = make_plan(8);
    for (BarAttributes& bar : quiet.bars) bar.energy = 2;
    EditSpec up_spec = energy_edit({3, 6}, 5);
    const StructuralPlan loud_plan = apply_edit(quiet, up_spec);

    const AudioBuffer quiet_audio = render_plan(quiet);
    const AudioBuffer loud_audio = render_plan(loud_plan);
    const FrameSpec fs{24000.0, 256, {}};
    const std::vector<int> region =
        span_frames(loud_plan, edit_spans(loud_plan, up_spec), fs, 1024, true);

    Predicate up;
    up.kind = Predicate::Kind::EnergyUp;
    up.delta_db = 3.0;
    CHECK(evaluate_predicate(up, loud_audio, quiet_audio, region, loud_plan));
    CHECK_FALSE(evaluate_predicate(up, quiet_audio, quiet_audio, region, loud_plan));

    Predicate down;
    down.kind = Predicate::Kind::EnergyDown;
    down.delta_db = 3.0;
    CHECK(evaluate_predicate(down, quiet_audio, loud_audio, region, loud_plan));
    CHECK_FALSE(evaluate_predicate(down, loud_audio, quiet_audio, region, loud_plan));
}

TEST_CASE("silence predicate passes on muted bars") {
    StructuralPlan plan = make_plan(8);
    EditSpec spec;
    EditOp op;
    op.kind = EditOp::Kind::Mute;
    op.span = {3, 4};
    spec.ops.push_back(op);
    Predicate silence;
    silence.kind = Predicate::Kind::Silence;
    silence.threshold_db = -60.0;
    spec.constraints.push_back(silence);

    const StructuralPlan muted = apply_edit(plan, spec);
    const AudioBuffer before = render_plan(plan);
    const AudioBuffer after = render_plan(muted);
    const EfsReport report = efs(before, after, spec, muted);
    CHECK(report.p == 1.0);
    CHECK(report.total == doctest::Approx(100.0));
}

TEST_CASE("tempo predicate passes on an oracle-tempo region") {
    const StructuralPlan plan = make_plan(8, 120.0);
    const AudioBuffer audio = render_plan(plan);
    const FrameSpec fs{24000.0, 256, {}};
    EditSpec span_all = energy_edit({1, 8}, 5);
    const std::vector<int> region =
        span_frames(plan, edit_spans(plan, span_all), fs, 1024, true);

    Predicate tempo;
    tempo.kind = Predicate::Kind::TempoSet;
    tempo.target_bpm = 120.0;
    tempo.bpm_tolerance = 0.05;
    CHECK(evaluate_predicate(tempo, audio, audio, region, plan));

    tempo.target_bpm = 80.0;
    CHECK_FALSE(evaluate_predicate(tempo, audio, audio, region, plan));
}

TEST_CASE("tempo and groove predicates demand two bars of frames") {
    const StructuralPlan plan = make_plan(8);
    const AudioBuffer audio = render_plan(plan);
    const FrameSpec fs{24000.0, 256, {}};
    EditSpec tiny = energy_edit({2, 2}, 5);
    const std::vector<int> region =
        span_frames(plan, edit_spans(plan, tiny), fs, 1024, true);

    Predicate tempo;
    tempo.kind = Predicate::Kind::TempoSet;
    CHECK_THROWS_WITH_AS(evaluate_predicate(tempo, audio, audio, region, plan),
                         doctest::Contains("RegionTooShort"), DomainError);
}

TEST_CASE("groove predicate identifies the rendered pattern") {
    StructuralPlan plan = make_plan(8);
    for (BarAttributes& bar : plan.bars) bar.groove = Groove::FourFloor;
    const AudioBuffer audio = render_plan(plan);
    const FrameSpec fs{24000.0, 256, {}};
    EditSpec span_all = energy_edit({1, 8}, 5);
    const std::vector<int> region =
        span_frames(plan, edit_spans(plan, span_all), fs, 1024, true);

    Predicate groove;
    groove.kind = Predicate::Kind::GrooveMatch;
    groove.groove = Groove::FourFloor;
    groove.min_correlation = 0.25;
    CHECK(evaluate_predicate(groove, audio, audio, region, plan));
}

TEST_CASE("harmony predicate matches the rendered chord") {
    StructuralPlan plan = make_plan(8);
    const HarmonyCode f_major{{5, Mode::Major}, 1, ChordQuality::Major};
    for (BarAttributes& bar : plan.bars) bar.harmony = f_major;
    const AudioBuffer audio = render_plan(plan);
    const FrameSpec fs{24000.0, 256, {}};
    EditSpec span_all = energy_edit({1, 8}, 5);
    const std::vector<int> region =
        span_frames(plan, edit_spans(plan, span_all), fs, 1024, true);

    Predicate harmony;
    harmony.kind = Predicate::Kind::HarmonyMatch;
    harmony.chord = f_major;
    harmony.min_correlation = 0.4;
    CHECK(evaluate_predicate(harmony, audio, audio, region, plan));

    // a distant chord should not match
    harmony.chord = HarmonyCode{{6, Mode::Major}, 1, ChordQuality::Major}; // F# major
    CHECK_FALSE(evaluate_predicate(harmony, audio, audio, region, plan));
}

} // TEST_SUITE
