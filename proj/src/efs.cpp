#include "plankit/efs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plankit/analysis.hpp"
#include "plankit/control.hpp"
#include "plankit/error.hpp"
#include "plankit/synth.hpp"

namespace plankit {

namespace {

constexpr double kChromaFoldMinHz = 80.0;
constexpr double kChromaFoldMaxHz = 2000.0;

double mean_log_mel(const MelSpectrogram& mel, const std::vector<int>& region) {
    double acc = 0.0;
    for (int t : region) {
        const float* frame = mel.frame(t);
        for (int f = 0; f < mel.bins; ++f) acc += frame[f];
    }
    return acc / (static_cast<double>(region.size()) * mel.bins);
}

// Bars of the plan whose time interval intersects the region's time range.
std::pair<int, int> region_bar_range(const StructuralPlan& plan, const MelSpectrogram& mel,
                                     const std::vector<int>& region) {
    const double fps = mel.frames_per_second();
    const double begin_s = region.front() / fps;
    const double end_s = region.back() / fps;
    return {bar_index(plan.grid, begin_s), bar_index(plan.grid, end_s)};
}

void require_min_bars(const StructuralPlan& plan, const MelSpectrogram& mel,
                      const std::vector<int>& region, const char* what) {
    const auto [first, last] = region_bar_range(plan, mel, region);
    if (last - first + 1 < 2) {
        throw DomainError("RegionTooShort",
                          std::string(what) + " needs at least two bars of frames");
    }
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = a.size();
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
    return cov / std::sqrt(var_a * var_b);
}

bool check_energy(const Predicate& pred, const MelSpectrogram& mel_edit,
                  const MelSpectrogram& mel_orig, const std::vector<int>& region) {
    // Predicate thresholds are in dB; log-mel values are in nats.
    const double delta_nats = pred.delta_db * std::numbers::ln10 / 20.0;
    const double shift = mean_log_mel(mel_edit, region) - mean_log_mel(mel_orig, region);
    return pred.kind == Predicate::Kind::EnergyUp ? shift >= delta_nats
                                                  : shift <= -delta_nats;
}

bool check_silence(const Predicate& pred, const MelSpectrogram& mel_edit,
                   const std::vector<int>& region) {
    double acc = 0.0;
    for (int t : region) {
        const float* frame = mel_edit.frame(t);
        for (int f = 0; f < mel_edit.bins; ++f) {
            acc += std::max(0.0, std::exp(static_cast<double>(frame[f])) -
                                     mel_edit.params.log_floor);
        }
    }
    const double mean_mag = acc / (static_cast<double>(region.size()) * mel_edit.bins);
    const double level_db = 20.0 * std::log10(std::max(mean_mag, 1e-12));
    return level_db < pred.threshold_db;
}

bool check_tempo(const Predicate& pred, const MelSpectrogram& mel_edit,
                 const StructuralPlan& plan, const std::vector<int>& region) {
    require_min_bars(plan, mel_edit, region, "tempo_set");
    const std::vector<float> env = onset_envelope(mel_edit);
    const int first = region.front();
    const int last = region.back();
    std::vector<float> slice(env.begin() + first, env.begin() + last + 1);

    const double fps = mel_edit.frames_per_second();
    const double slice_s = slice.size() / fps;
    const double window_s = std::min(4.0, slice_s);
    std::vector<TempoEstimate> estimates =
        tempo_estimates(slice, fps, window_s, std::max(0.5, window_s / 4.0));

    std::vector<double> bpms;
    for (const TempoEstimate& e : estimates) bpms.push_back(e.bpm);
    std::nth_element(bpms.begin(), bpms.begin() + bpms.size() / 2, bpms.end());
    const double median_bpm = bpms[bpms.size() / 2];

    // The autocorrelation peak can land an octave off depending on the hit
    // pattern, so the target is matched up to a factor of two.
    for (double factor : {0.5, 1.0, 2.0}) {
        if (std::abs(median_bpm * factor - pred.target_bpm) <=
            pred.target_bpm * pred.bpm_tolerance) {
            return true;
        }
    }
    return false;
}

// Expected onset pattern for the groove over the region's bars, smoothed to
// triangle bumps so slight detection latency still correlates.
std::vector<double> groove_target(const Predicate& pred, const StructuralPlan& plan,
                                  const MelSpectrogram& mel, int first, int last) {
    std::vector<double> target(last - first + 1, 0.0);
    const double fps = mel.frames_per_second();
    const std::vector<double> downbeats = downbeat_times(plan.grid);
    const auto [bar_lo, bar_hi] =
        std::pair{bar_index(plan.grid, first / fps), bar_index(plan.grid, last / fps)};
    for (int bar = bar_lo; bar <= bar_hi; ++bar) {
        const double beat_s = bar_duration(plan.grid, bar) / plan.grid.meter.numerator;
        for (const GrooveHit& hit : groove_hits_for_bar(pred.groove, plan.grid.meter.numerator)) {
            const double t_s = downbeats[bar - 1] + hit.beat_offset * beat_s;
            const int frame = static_cast<int>(std::llround(t_s * fps)) - first;
            for (int d = -1; d <= 1; ++d) {
                const int idx = frame + d;
                if (idx >= 0 && idx < static_cast<int>(target.size())) {
                    target[idx] = std::max(target[idx], hit.velocity * (1.0 - 0.5 * std::abs(d)));
                }
            }
        }
    }
    return target;
}

bool check_groove(const Predicate& pred, const MelSpectrogram& mel_edit,
                  const StructuralPlan& plan, const std::vector<int>& region) {
    require_min_bars(plan, mel_edit, region, "groove_match");
    const std::vector<float> env = onset_envelope(mel_edit);
    const int first = region.front();
    const int last = region.back();
    std::vector<double> observed(env.begin() + first, env.begin() + last + 1);
    const std::vector<double> target = groove_target(pred, plan, mel_edit, first, last);

    // Best circular phase within one beat of slack on either side.
    const auto [bar_lo, bar_hi] = region_bar_range(plan, mel_edit, region);
    const double beat_s = bar_duration(plan.grid, bar_lo) / plan.grid.meter.numerator;
    const int max_shift = std::max(1, static_cast<int>(std::llround(beat_s * mel_edit.frames_per_second())));
    const int n = static_cast<int>(observed.size());

    double best = -1.0;
    std::vector<double> shifted(n);
    for (int shift = -max_shift; shift <= max_shift; ++shift) {
        for (int i = 0; i < n; ++i) {
            shifted[i] = target[((i + shift) % n + n) % n];
        }
        best = std::max(best, pearson(observed, shifted));
    }
    return best >= pred.min_correlation;
}

bool check_harmony(const Predicate& pred, const MelSpectrogram& mel_edit,
                   const std::vector<int>& region) {
    // Fold linear mel magnitudes into pitch classes over the pad band.
    const std::vector<double> centers = mel_center_frequencies(mel_edit.params);
    std::vector<int> bin_pc(mel_edit.bins, -1);
    for (int b = 0; b < mel_edit.bins; ++b) {
        if (centers[b] < kChromaFoldMinHz || centers[b] > kChromaFoldMaxHz) continue;
        const double midi = 69.0 + 12.0 * std::log2(centers[b] / 440.0);
        bin_pc[b] = ((static_cast<int>(std::llround(midi)) % 12) + 12) % 12;
    }

    std::vector<double> template_pc(12, 0.0);
    for (int pc : chord_pitch_classes(pred.chord)) template_pc[pc] = 1.0;

    double acc = 0.0;
    std::vector<double> chroma(12);
    for (int t : region) {
        std::fill(chroma.begin(), chroma.end(), 0.0);
        const float* frame = mel_edit.frame(t);
        for (int b = 0; b < mel_edit.bins; ++b) {
            if (bin_pc[b] < 0) continue;
            chroma[bin_pc[b]] +=
                std::max(0.0, std::exp(static_cast<double>(frame[b])) -
                                  mel_edit.params.log_floor);
        }
        acc += pearson(chroma, template_pc);
    }
    return acc / region.size() >= pred.min_correlation;
}

bool evaluate_predicate_on_mels(const Predicate& pred, const MelSpectrogram& mel_edit,
                                const MelSpectrogram& mel_orig,
                                const std::vector<int>& region,
                                const StructuralPlan& edited_plan) {
    if (region.empty()) {
        throw DomainError("EmptyRegion", "predicate needs a non-empty region");
    }
    switch (pred.kind) {
        case Predicate::Kind::EnergyUp:
        case Predicate::Kind::EnergyDown:
            return check_energy(pred, mel_edit, mel_orig, region);
        case Predicate::Kind::Silence:
            return check_silence(pred, mel_edit, region);
        case Predicate::Kind::TempoSet:
            return check_tempo(pred, mel_edit, edited_plan, region);
        case Predicate::Kind::GrooveMatch:
            return check_groove(pred, mel_edit, edited_plan, region);
        case Predicate::Kind::HarmonyMatch:
            return check_harmony(pred, mel_edit, region);
    }
    return false;
}

} // namespace

EfsBreakdown efs_total(double p, double delta_in, double delta_out, double alpha) {
    EfsBreakdown out;
    if (delta_in + delta_out > 0.0) {
        out.r = delta_in / (delta_in + delta_out);
    } else {
        out.r = 0.0;
        out.no_change = true;
    }
    out.total = 100.0 * (alpha * p + (1.0 - alpha) * out.r);
    return out;
}

EfsReport efs(const AudioBuffer& original, const AudioBuffer& edited, const EditSpec& spec,
              const StructuralPlan& edited_plan, double alpha, const MelParams& mel_params) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("InvalidArgument", "alpha must lie in [0, 1]");
    }
    if (spec.constraints.empty()) {
        throw DomainError("EmptySpec", "edit spec has no constraints");
    }
    if (original.sample_rate != edited.sample_rate) {
        throw DomainError("LengthMismatch", "sample rates differ");
    }

    const MelSpectrogram mel_orig = mel_spectrogram(original, mel_params);
    const MelSpectrogram mel_edit = mel_spectrogram(edited, mel_params);
    if (mel_orig.frames != mel_edit.frames) {
        throw DomainError("LengthMismatch",
                          "mel frame counts differ (" + std::to_string(mel_orig.frames) +
                              " vs " + std::to_string(mel_edit.frames) +
                              "); compare equal-length windows");
    }

    FrameSpec frame_spec;
    frame_spec.sample_rate = edited.sample_rate;
    frame_spec.hop = mel_params.hop;
    frame_spec.frame_count = mel_edit.frames;
    const std::vector<BarSpan> spans = edit_spans(edited_plan, spec);
    // Widen by the transform window so every frame that can see edited
    // samples counts as inside the region.
    const std::vector<int> region =
        span_frames(edited_plan, spans, frame_spec, mel_params.fft_size);
    if (region.empty()) {
        throw DomainError("EmptyRegion", "edit region covers no frames");
    }
    // Predicates judge the region's content, so they only get frames whose
    // windows lie fully inside the edited bars.
    std::vector<int> core =
        span_frames(edited_plan, spans, frame_spec, mel_params.fft_size, true);
    if (core.empty()) core = region;

    std::vector<char> in_region(mel_edit.frames, 0);
    for (int t : region) in_region[t] = 1;

    EfsReport report;
    report.alpha = alpha;
    for (int t = 0; t < mel_edit.frames; ++t) {
        const float* a = mel_orig.frame(t);
        const float* b = mel_edit.frame(t);
        double acc = 0.0;
        for (int f = 0; f < mel_edit.bins; ++f) {
            acc += std::abs(static_cast<double>(b[f]) - a[f]);
        }
        (in_region[t] ? report.delta_in : report.delta_out) += acc;
    }

    int passed = 0;
    for (const Predicate& pred : spec.constraints) {
        const bool ok = evaluate_predicate_on_mels(pred, mel_edit, mel_orig, core, edited_plan);
        report.predicates.push_back({pred.kind, ok});
        if (ok) ++passed;
    }
    report.p = static_cast<double>(passed) / spec.constraints.size();

    const EfsBreakdown breakdown =
        efs_total(report.p, report.delta_in, report.delta_out, alpha);
    report.r = breakdown.r;
    report.total = breakdown.total;
    // An edit that changed nothing earns no locality credit.
    if (breakdown.no_change) report.flags.push_back("NoChange");
    return report;
}

bool evaluate_predicate(const Predicate& pred, const AudioBuffer& edited,
                        const AudioBuffer& original, const std::vector<int>& region,
                        const StructuralPlan& edited_plan, const MelParams& mel_params) {
    const MelSpectrogram mel_edit = mel_spectrogram(edited, mel_params);
    const MelSpectrogram mel_orig = mel_spectrogram(original, mel_params);
    return evaluate_predicate_on_mels(pred, mel_edit, mel_orig, region, edited_plan);
}

} // namespace plankit
