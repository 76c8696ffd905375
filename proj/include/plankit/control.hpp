#pragma once

#include <optional>
#include <vector>

#include "plankit/plan.hpp"

namespace plankit {

// Frame grid shared by the control tensor and the mel pipeline.
// Frame j (0-indexed) starts at time j * hop / sample_rate.
struct FrameSpec {
    double sample_rate = 24000.0;
    int hop = 256;
    std::optional<int> frame_count; // defaults from the plan duration

    double frames_per_second() const { return sample_rate / hop; }

    bool operator==(const FrameSpec&) const = default;
};

// Fixed control channel layout. One-hot groups first, then timing channels.
namespace channel {
inline constexpr int kSectionBase = 0;            // 8 channels
inline constexpr int kEnergyBase = 8;             // 6 channels, levels 0..5
inline constexpr int kGrooveBase = 14;            // 8 channels
inline constexpr int kDegreeBase = 22;            // 7 channels, all-zero when no harmony
inline constexpr int kQualityBase = 29;           // 4 channels, all-zero when no harmony
inline constexpr int kPhaseSin = 33;
inline constexpr int kPhaseCos = 34;
inline constexpr int kTempo = 35;                 // bpm / kBetaMax
inline constexpr int kBarRamp = 36;
inline constexpr int kSectionRamp = 37;
inline constexpr int kCount = 38;
} // namespace channel

// Boundary impulses are smoothed with this window: odd length, unit peak.
inline constexpr int kRampWindowFrames = 11;

struct ControlTensor {
    int channels = 0;
    int frames = 0;
    std::vector<float> data; // channel-major: data[c * frames + t]

    float at(int c, int t) const { return data[static_cast<size_t>(c) * frames + t]; }
    float& at(int c, int t) { return data[static_cast<size_t>(c) * frames + t]; }

    bool operator==(const ControlTensor&) const = default;
};

// D x F x T broadcast of a control tensor: every frequency row of plane d
// repeats channel d. Layout: data[(d * bins + f) * frames + t].
struct TiledTensor {
    int channels = 0;
    int bins = 0;
    int frames = 0;
    std::vector<float> data;

    float at(int d, int f, int t) const {
        return data[(static_cast<size_t>(d) * bins + f) * frames + t];
    }

    bool operator==(const TiledTensor&) const = default;
};

int default_frame_count(const StructuralPlan& plan, const FrameSpec& spec);

std::vector<double> frame_times(const FrameSpec& spec, int count);

// Largest bar whose downbeat is at or before u; clamps past the final bar.
int bar_index(const BeatGrid& grid, double u);

// Fractional position of u inside its bar, in [0, 1).
double bar_phase(const BeatGrid& grid, double u);

ControlTensor encode_controls(const StructuralPlan& plan, const FrameSpec& spec,
                              double beta_max = kBetaMax);

// Plain single-threaded implementation kept as the reference for the
// parallel kernel.
ControlTensor encode_controls_serial(const StructuralPlan& plan, const FrameSpec& spec,
                                     double beta_max = kBetaMax);

TiledTensor tile_controls(const ControlTensor& ctrl, int mel_bins);

} // namespace plankit
