#include "plankit/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plankit/error.hpp"

namespace plankit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Unit-peak Hann window over kRampWindowFrames frames, centered at index 5.
double ramp_window(int offset) {
    const int k = offset + (kRampWindowFrames - 1) / 2;
    if (k < 0 || k >= kRampWindowFrames) return 0.0;
    return 0.5 - 0.5 * std::cos(kTwoPi * k / (kRampWindowFrames - 1));
}

// Precomputed timing tables shared by every frame of one encoding run.
struct EncodeContext {
    const StructuralPlan* plan = nullptr;
    FrameSpec spec;
    double beta_max = kBetaMax;
    int frames = 0;
    std::vector<double> downbeats;
    std::vector<double> durations;
    std::vector<int> bar_boundary_frames;     // sorted, distinct
    std::vector<int> section_boundary_frames; // sorted, distinct

    double frame_time(int t) const { return t * spec.hop / spec.sample_rate; }

    int bar_at(double u) const {
        auto it = std::upper_bound(downbeats.begin(), downbeats.end(), u);
        int bar = static_cast<int>(it - downbeats.begin());
        return std::clamp(bar, 1, static_cast<int>(downbeats.size()));
    }
};

int nearest_frame(double time, const FrameSpec& spec) {
    return static_cast<int>(std::llround(time * spec.sample_rate / spec.hop));
}

std::vector<int> distinct_frames(std::vector<int> frames, int frame_count) {
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    std::erase_if(frames, [&](int f) { return f < 0 || f >= frame_count; });
    return frames;
}

EncodeContext make_context(const StructuralPlan& plan, const FrameSpec& spec,
                           double beta_max) {
    require_valid(plan, beta_max);
    if (spec.sample_rate <= 0 || spec.hop < 1) {
        throw DomainError("InvalidFrameSpec", "sample_rate must be positive and hop >= 1");
    }

    EncodeContext ctx;
    ctx.plan = &plan;
    ctx.spec = spec;
    ctx.beta_max = beta_max;
    ctx.frames = spec.frame_count ? *spec.frame_count : default_frame_count(plan, spec);
    if (ctx.frames < 1) {
        throw DomainError("InvalidFrameSpec", "frame count must be >= 1");
    }
    ctx.downbeats = downbeat_times(plan.grid);
    ctx.durations.resize(plan.bar_count());
    for (int t = 1; t <= plan.bar_count(); ++t) {
        ctx.durations[t - 1] = bar_duration(plan.grid, t);
    }
    const double total = ctx.downbeats.back() + ctx.durations.back();

    std::vector<int> bar_frames;
    for (double tau : ctx.downbeats) bar_frames.push_back(nearest_frame(tau, spec));
    bar_frames.push_back(nearest_frame(total, spec));
    ctx.bar_boundary_frames = distinct_frames(std::move(bar_frames), ctx.frames);

    std::vector<int> section_frames;
    for (const SectionSpan& span : section_spans(plan)) {
        section_frames.push_back(nearest_frame(ctx.downbeats[span.first_bar - 1], spec));
        const double end = ctx.downbeats[span.last_bar - 1] + ctx.durations[span.last_bar - 1];
        section_frames.push_back(nearest_frame(end, spec));
    }
    ctx.section_boundary_frames = distinct_frames(std::move(section_frames), ctx.frames);
    return ctx;
}

// Sum of smoothing windows centered on nearby boundary frames, clamped to 1.
double ramp_value(const std::vector<int>& boundaries, int frame) {
    const int half = (kRampWindowFrames - 1) / 2;
    auto first = std::lower_bound(boundaries.begin(), boundaries.end(), frame - half);
    double value = 0.0;
    for (auto it = first; it != boundaries.end() && *it <= frame + half; ++it) {
        value += ramp_window(frame - *it);
    }
    return std::min(value, 1.0);
}

// Writes all 38 channel values for one frame.
void encode_frame(const EncodeContext& ctx, int t, ControlTensor& out) {
    const double u = ctx.frame_time(t);
    const int bar = ctx.bar_at(u);
    const BarAttributes& attrs = ctx.plan->bars[bar - 1];

    auto set = [&](int c, double v) { out.at(c, t) = static_cast<float>(v); };

    set(channel::kSectionBase + static_cast<int>(attrs.section), 1.0);
    set(channel::kEnergyBase + attrs.energy, 1.0);
    set(channel::kGrooveBase + static_cast<int>(attrs.groove), 1.0);
    if (attrs.harmony) {
        set(channel::kDegreeBase + attrs.harmony->degree - 1, 1.0);
        set(channel::kQualityBase + static_cast<int>(attrs.harmony->quality), 1.0);
    }

    double psi = (u - ctx.downbeats[bar - 1]) / ctx.durations[bar - 1];
    psi = std::clamp(psi, 0.0, std::nextafter(1.0, 0.0));
    set(channel::kPhaseSin, std::sin(kTwoPi * psi));
    set(channel::kPhaseCos, std::cos(kTwoPi * psi));
    set(channel::kTempo, ctx.plan->grid.bpm[bar - 1] / ctx.beta_max);
    set(channel::kBarRamp, ramp_value(ctx.bar_boundary_frames, t));
    set(channel::kSectionRamp, ramp_value(ctx.section_boundary_frames, t));
}

} // namespace

int default_frame_count(const StructuralPlan& plan, const FrameSpec& spec) {
    require_valid(plan);
    return static_cast<int>(
        std::ceil(total_duration(plan) * spec.sample_rate / spec.hop));
}

std::vector<double> frame_times(const FrameSpec& spec, int count) {
    std::vector<double> times(count);
    for (int t = 0; t < count; ++t) {
        times[t] = t * spec.hop / spec.sample_rate;
    }
    return times;
}

int bar_index(const BeatGrid& grid, double u) {
    if (grid.bar_count() == 0) throw DomainError("EmptyPlan", "grid has no bars");
    if (u < 0.0) throw DomainError("NegativeTime", "time must be >= 0");
    const std::vector<double> downbeats = downbeat_times(grid);
    auto it = std::upper_bound(downbeats.begin(), downbeats.end(), u);
    const int bar = static_cast<int>(it - downbeats.begin());
    return std::clamp(bar, 1, grid.bar_count());
}

double bar_phase(const BeatGrid& grid, double u) {
    const int bar = bar_index(grid, u);
    const std::vector<double> downbeats = downbeat_times(grid);
    const double psi = (u - downbeats[bar - 1]) / bar_duration(grid, bar);
    return std::clamp(psi, 0.0, std::nextafter(1.0, 0.0));
}

ControlTensor encode_controls(const StructuralPlan& plan, const FrameSpec& spec,
                              double beta_max) {
    const EncodeContext ctx = make_context(plan, spec, beta_max);
    ControlTensor out;
    out.channels = channel::kCount;
    out.frames = ctx.frames;
    out.data.assign(static_cast<size_t>(out.channels) * out.frames, 0.0f);

    // Frames are independent, so the result does not depend on the schedule.
#pragma omp parallel for schedule(static)
    for (int t = 0; t < ctx.frames; ++t) {
        encode_frame(ctx, t, out);
    }
    return out;
}

ControlTensor encode_controls_serial(const StructuralPlan& plan, const FrameSpec& spec,
                                     double beta_max) {
    const EncodeContext ctx = make_context(plan, spec, beta_max);
    ControlTensor out;
    out.channels = channel::kCount;
    out.frames = ctx.frames;
    out.data.assign(static_cast<size_t>(out.channels) * out.frames, 0.0f);
    for (int t = 0; t < ctx.frames; ++t) {
        encode_frame(ctx, t, out);
    }
    return out;
}

TiledTensor tile_controls(const ControlTensor& ctrl, int mel_bins) {
    if (mel_bins < 1) {
        throw DomainError("InvalidArgument", "mel bin count must be >= 1");
    }
    TiledTensor out;
    out.channels = ctrl.channels;
    out.bins = mel_bins;
    out.frames = ctrl.frames;
    out.data.resize(static_cast<size_t>(out.channels) * out.bins * out.frames);
    for (int d = 0; d < ctrl.channels; ++d) {
        const float* src = ctrl.data.data() + static_cast<size_t>(d) * ctrl.frames;
        for (int f = 0; f < mel_bins; ++f) {
            float* dst = out.data.data() +
                         (static_cast<size_t>(d) * mel_bins + f) * ctrl.frames;
            std::copy(src, src + ctrl.frames, dst);
        }
    }
    return out;
}

} // namespace plankit
