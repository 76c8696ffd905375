#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "plankit/control.hpp"
#include "plankit/control_file.hpp"
#include "plankit/edit.hpp"
#include "plankit/error.hpp"
#include "plankit/parallel.hpp"

#include "helpers.hpp"

using namespace plankit;
using plankit::testing::make_plan;
using plankit::testing::random_plan;

namespace {

// Independent phase oracle: linear scan of the downbeat table.
double phase_by_scan(const BeatGrid& grid, double u) {
    const std::vector<double> downbeats = downbeat_times(grid);
    int bar = 1;
    for (int t = 1; t <= grid.bar_count(); ++t) {
        if (downbeats[t - 1] <= u) bar = t;
    }
    const double width = grid.meter.numerator * 60.0 / grid.bpm[bar - 1];
    double psi = (u - downbeats[bar - 1]) / width;
    if (psi < 0.0) psi = 0.0;
    if (psi >= 1.0) psi = std::nextafter(1.0, 0.0);
    return psi;
}

bool one_hot_group_ok(const ControlTensor& c, int base, int count, int t, bool allow_empty) {
    int ones = 0;
    for (int ch = base; ch < base + count; ++ch) {
        const float v = c.at(ch, t);
        if (v == 1.0f) {
            ++ones;
        } else if (v != 0.0f) {
            return false;
        }
    }
    return ones == 1 || (allow_empty && ones == 0);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_SUITE("control") {

TEST_CASE("frame times start at zero with hop spacing") {
    FrameSpec fs;
    const std::vector<double> times = frame_times(fs, 4);
    CHECK(times[0] == 0.0);
    CHECK(times[1] == doctest::Approx(256.0 / 24000.0)); // ~10.667 ms
    CHECK(times[1] - times[0] == doctest::Approx(0.0107).epsilon(1e-2));

    FrameSpec centisecond{24000.0, 240, {}};
    CHECK(frame_times(centisecond, 101)[100] == doctest::Approx(1.0));
}

TEST_CASE("bar_index basics and clamping") {
    BeatGrid grid{{4, 4}, {120.0, 120.0, 120.0}};
    CHECK(bar_index(grid, 0.0) == 1);
    CHECK(bar_index(grid, 3.0) == 2);
    CHECK(bar_index(grid, 100.0) == 3);
    CHECK_THROWS_WITH_AS(bar_index(grid, -0.1), doctest::Contains("NegativeTime"),
                         DomainError);
}

TEST_CASE("bar phase examples") {
    BeatGrid grid{{4, 4}, {120.0, 120.0}};
    CHECK(bar_phase(grid, 0.0) == 0.0);
    CHECK(bar_phase(grid, 2.0) == 0.0);
    CHECK(bar_phase(grid, 0.5) == doctest::Approx(0.25));

    BeatGrid mixed{{4, 4}, {120.0, 60.0}};
    CHECK(bar_phase(mixed, 3.0) == doctest::Approx(0.25));
}

TEST_CASE("bar phase agrees with the downbeat-scan oracle") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> jitter(0.0, 1.2);
    for (int trial = 0; trial < 1000; ++trial) {
        const StructuralPlan plan = random_plan(rng);
        const double u = jitter(rng) * total_duration(plan);
        const double got = bar_phase(plan.grid, u);
        const double want = phase_by_scan(plan.grid, u);
        REQUIRE(got == doctest::Approx(want).epsilon(1e-9));
        REQUIRE(got >= 0.0);
        REQUIRE(got < 1.0);
    }
}

TEST_CASE("encode: timing channels at a downbeat frame") {
    const StructuralPlan plan = make_plan(4);
    const ControlTensor c = encode_controls(plan, FrameSpec{});
    CHECK(c.channels == channel::kCount);
    CHECK(c.at(channel::kPhaseSin, 0) == 0.0f);
    CHECK(c.at(channel::kPhaseCos, 0) == 1.0f);
    CHECK(c.at(channel::kTempo, 0) == doctest::Approx(0.4)); // 120 / 300
}

TEST_CASE("encode: missing harmony zeroes channels 22..32") {
    StructuralPlan plan = make_plan(2);
    plan.bars[0].harmony.reset();
    const ControlTensor c = encode_controls(plan, FrameSpec{});
    for (int ch = channel::kDegreeBase; ch < channel::kPhaseSin; ++ch) {
        CHECK(c.at(ch, 0) == 0.0f);
    }
    // second bar still has its harmony one-hots
    const int second_bar_frame = c.frames - 1;
    CHECK(one_hot_group_ok(c, channel::kDegreeBase, kDegreeCount, second_bar_frame, false));
}

TEST_CASE("encode: isolated boundary ramp peaks at exactly 1") {
    const StructuralPlan plan = make_plan(4); // bars every 2 s, ~187 frames apart
    const ControlTensor c = encode_controls(plan, FrameSpec{});
    const int boundary_frame = static_cast<int>(std::llround(2.0 * 24000.0 / 256.0));
    CHECK(c.at(channel::kBarRamp, boundary_frame) == 1.0f);
    CHECK(c.at(channel::kBarRamp, 0) == 1.0f); // plan start is a bar boundary too
    // window endpoints are zero at distance 5
    CHECK(c.at(channel::kBarRamp, boundary_frame + 5) == 0.0f);
    CHECK(c.at(channel::kBarRamp, boundary_frame - 3) > 0.0f);
}

TEST_CASE("contract invariants hold for random plans") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const StructuralPlan plan = random_plan(rng, 2, 12);
        const ControlTensor c = encode_controls(plan, FrameSpec{});

        double prev_psi = -1.0;
        for (int t = 0; t < c.frames; ++t) {
            REQUIRE(one_hot_group_ok(c, channel::kSectionBase, kSectionCount, t, false));
            REQUIRE(one_hot_group_ok(c, channel::kEnergyBase, kEnergyLevels, t, false));
            REQUIRE(one_hot_group_ok(c, channel::kGrooveBase, kGrooveCount, t, false));
            const bool has_harmony = plan.bars[bar_index(plan.grid, t * 256.0 / 24000.0) - 1]
                                         .harmony.has_value();
            REQUIRE(one_hot_group_ok(c, channel::kDegreeBase, kDegreeCount, t, !has_harmony));
            REQUIRE(one_hot_group_ok(c, channel::kQualityBase, kQualityCount, t, !has_harmony));

            const double s = c.at(channel::kPhaseSin, t);
            const double cs = c.at(channel::kPhaseCos, t);
            REQUIRE(std::abs(s * s + cs * cs - 1.0) < 1e-6);

            const float bpm = c.at(channel::kTempo, t);
            REQUIRE(bpm > 0.0f);
            REQUIRE(bpm <= 1.0f);
            REQUIRE(c.at(channel::kBarRamp, t) >= 0.0f);
            REQUIRE(c.at(channel::kBarRamp, t) <= 1.0f);
            REQUIRE(c.at(channel::kSectionRamp, t) >= 0.0f);
            REQUIRE(c.at(channel::kSectionRamp, t) <= 1.0f);

            // psi is nondecreasing within a bar and resets at downbeats
            const double psi = std::atan2(s, cs) / (2.0 * std::numbers::pi);
            const double unwrapped = psi < 0.0 ? psi + 1.0 : psi;
            if (t > 0 && unwrapped < prev_psi - 1e-9) {
                REQUIRE(unwrapped < 0.35); // reset lands near the bar start
            }
            prev_psi = unwrapped;
        }
    }
}

TEST_CASE("encoding is deterministic across runs and thread counts") {
    std::mt19937 rng(43);
    const StructuralPlan plan = random_plan(rng, 4, 10);
    const ControlTensor serial = encode_controls_serial(plan, FrameSpec{});

    const int original = max_threads();
    set_threads(1);
    const ControlTensor one = encode_controls(plan, FrameSpec{});
    set_threads(original > 1 ? original : 2);
    const ControlTensor many = encode_controls(plan, FrameSpec{});
    set_threads(original);

    REQUIRE(one == serial);
    REQUIRE(many == serial);
    REQUIRE(encode_controls(plan, FrameSpec{}) == serial);
}

TEST_CASE("control edit locality within the ramp half-window") {
    const StructuralPlan plan = make_plan(8);
    EditSpec spec;
    EditOp op;
    op.kind = EditOp::Kind::SetEnergy;
    op.span = {3, 4};
    op.energy = 5;
    spec.ops.push_back(op);
    spec.constraints.push_back(Predicate{});

    const StructuralPlan edited = apply_edit(plan, spec);
    const ControlTensor before = encode_controls(plan, FrameSpec{});
    const ControlTensor after = encode_controls(edited, FrameSpec{});
    const std::vector<int> region = edit_region_frames(plan, spec, FrameSpec{});

    std::vector<char> allowed(before.frames, 0);
    for (int t : region) {
        for (int d = -5; d <= 5; ++d) {
            const int idx = t + d;
            if (idx >= 0 && idx < before.frames) allowed[idx] = 1;
        }
    }
    for (int ch = 0; ch < before.channels; ++ch) {
        for (int t = 0; t < before.frames; ++t) {
            if (before.at(ch, t) != after.at(ch, t)) {
                REQUIRE(allowed[t]);
            }
        }
    }
}

TEST_CASE("WVRC file round trip is byte-identical") {
    std::mt19937 rng(47);
    const StructuralPlan plan = random_plan(rng, 2, 8);
    const ControlTensor c = encode_controls(plan, FrameSpec{});

    const std::string path_a = temp_path("plankit_test_a.wvc");
    const std::string path_b = temp_path("plankit_test_b.wvc");
    write_control_file(c, path_a);
    write_control_file(c, path_b);

    std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    REQUIRE(bytes_a == bytes_b);
    REQUIRE(bytes_a.size() == 16 + c.data.size() * 4);

    const ControlTensor back = read_control_file(path_a);
    REQUIRE(back == c);

    std::remove(path_a.c_str());
    std::remove(path_b.c_str());
}

TEST_CASE("corrupt control files raise IoError") {
    const std::string path = temp_path("plankit_test_bad.wvc");
    { std::ofstream(path, std::ios::binary) << "JUNKJUNK"; }
    CHECK_THROWS_AS(read_control_file(path), IoError);

    const StructuralPlan plan = make_plan(2);
    write_control_file(encode_controls(plan, FrameSpec{}), path);
    std::filesystem::resize_file(path, 24); // drop most of the payload
    CHECK_THROWS_AS(read_control_file(path), IoError);
    std::remove(path.c_str());
}

TEST_CASE("tiling replicates channels across the frequency axis") {
    // Exhaustive over small shapes.
    std::mt19937 rng(53);
    std::uniform_real_distribution<float> value(-2.0f, 2.0f);
    for (int d = 1; d <= 4; ++d) {
        for (int f = 1; f <= 8; ++f) {
            for (int t = 1; t <= 16; ++t) {
                ControlTensor c;
                c.channels = d;
                c.frames = t;
                c.data.resize(static_cast<size_t>(d) * t);
                for (float& v : c.data) v = value(rng);

                const TiledTensor tiled = tile_controls(c, f);
                REQUIRE(tiled.channels == d);
                REQUIRE(tiled.bins == f);
                REQUIRE(tiled.frames == t);
                for (int dd = 0; dd < d; ++dd) {
                    for (int ff = 0; ff < f; ++ff) {
                        for (int tt = 0; tt < t; ++tt) {
                            REQUIRE(tiled.at(dd, ff, tt) == c.at(dd, tt));
                        }
                    }
                }
            }
        }
    }

    // F = 1 keeps the values identical.
    ControlTensor c;
    c.channels = 3;
    c.frames = 5;
    c.data.resize(15);
    for (float& v : c.data) v = value(rng);
    CHECK(tile_controls(c, 1).data == c.data);

    CHECK_THROWS_AS(tile_controls(c, 0), DomainError);
}

TEST_CASE("tiling spot checks on a realistic tensor") {
    const StructuralPlan plan = make_plan(4);
    const ControlTensor c = encode_controls(plan, FrameSpec{});
    const TiledTensor tiled = tile_controls(c, 128);

    std::mt19937 rng(59);
    std::uniform_int_distribution<int> d_pick(0, c.channels - 1);
    std::uniform_int_distribution<int> f_pick(0, 127);
    std::uniform_int_distribution<int> t_pick(0, c.frames - 1);
    for (int i = 0; i < 1000; ++i) {
        const int d = d_pick(rng), f = f_pick(rng), t = t_pick(rng);
        REQUIRE(tiled.at(d, f, t) == c.at(d, t));
    }
}

} // TEST_SUITE
