#include "plankit/scs.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "plankit/error.hpp"
#include "plankit/plan.hpp"

namespace plankit {

namespace {

constexpr double kNoveltyKernelSeconds = 2.0;
constexpr double kTempoWindowSeconds = 4.0;
constexpr double kTempoHopSeconds = 1.0;
constexpr double kOnsetPeakFloor = 0.1;  // fraction of the envelope maximum
constexpr double kRecurrenceMinLagSeconds = 4.0;
constexpr double kTempoCvFullPenalty = 0.2;
// Novelty peaks below this absolute value are numerical flutter, not
// section boundaries; the curve is normalized so real junctions sit much
// higher.
constexpr float kNoveltyPeakFloor = 0.02f;

int novelty_kernel_frames(int total_frames, double fps) {
    int k = static_cast<int>(std::llround(kNoveltyKernelSeconds * fps));
    if (k % 2 == 0) --k;
    k = std::min(k, total_frames % 2 == 0 ? total_frames - 1 : total_frames);
    return std::max(k, 3);
}

double median(std::vector<float> values) {
    if (values.empty()) return 0.0;
    const size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
        m = 0.5 * (m + values[mid - 1]);
    }
    return m;
}

// Strict local maxima whose height above the curve median exceeds the median
// itself. Peaks inside half a kernel of either edge are ignored because the
// zero-padded correlation is not trustworthy there.
std::vector<int> qualifying_novelty_peaks(const std::vector<float>& novelty,
                                          int kernel_frames, double& median_out) {
    median_out = median(novelty);
    const int n = static_cast<int>(novelty.size());
    const int margin = (kernel_frames - 1) / 2;
    std::vector<int> peaks;
    for (int t = std::max(1, margin); t < n - std::max(1, margin); ++t) {
        if (novelty[t] > novelty[t - 1] && novelty[t] > novelty[t + 1]) {
            const double prominence = novelty[t] - median_out;
            if (prominence > median_out && novelty[t] > kNoveltyPeakFloor) {
                peaks.push_back(t);
            }
        }
    }
    return peaks;
}

// Pulse period in frames from the envelope autocorrelation, with parabolic
// refinement. Takes the shortest strong local maximum rather than the global
// one, so a backbeat's kick period does not shadow its onset grid; phases
// measured against a multiple of the grid would cancel out. Returns 0 when
// the envelope is flat.
double global_beat_period(const std::vector<float>& env, double fps) {
    const int n = static_cast<int>(env.size());
    const int lag_min = std::max(1, static_cast<int>(std::ceil(fps * 60.0 / kBetaMax)));
    const int lag_max =
        std::min(n - 2, static_cast<int>(std::floor(fps * 60.0 / kTempoMinBpm)));
    if (lag_max <= lag_min) return 0.0;

    double mean = 0.0;
    for (float v : env) mean += v;
    mean /= n;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = env[i] - mean;

    std::vector<double> ac(lag_max + 2, 0.0);
    double ac_max = 0.0;
    for (int lag = lag_min; lag <= lag_max + 1; ++lag) {
        double s = 0.0;
        for (int i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
        ac[lag] = s;
        if (lag <= lag_max) ac_max = std::max(ac_max, s);
    }
    if (ac_max <= 0.0) return 0.0;

    int best = -1;
    for (int lag = lag_min + 1; lag <= lag_max; ++lag) {
        const bool local_max = ac[lag] >= ac[lag - 1] && ac[lag] >= ac[lag + 1];
        if (local_max && ac[lag] >= 0.5 * ac_max) {
            best = lag;
            break;
        }
    }
    if (best < 0) return 0.0;

    double lag = best;
    const double denom = ac[best - 1] - 2.0 * ac[best] + ac[best + 1];
    if (denom < 0.0) lag += 0.5 * (ac[best - 1] - ac[best + 1]) / denom;
    return lag;
}

std::vector<int> onset_peaks(const std::vector<float>& env) {
    const int n = static_cast<int>(env.size());
    float peak = 0.0f;
    for (float v : env) peak = std::max(peak, v);
    std::vector<int> peaks;
    if (peak <= 0.0f) return peaks;
    const float floor = static_cast<float>(kOnsetPeakFloor) * peak;
    for (int t = 1; t + 1 < n; ++t) {
        if (env[t] > env[t - 1] && env[t] > env[t + 1] && env[t] >= floor) {
            peaks.push_back(t);
        }
    }
    return peaks;
}

} // namespace

double scs_total(const std::array<double, 5>& s, const ScsWeights& w) {
    const double weight_sum = w.sum();
    const double num =
        w.beat * s[0] + w.tempo * s[1] + w.bound * s[2] + w.recur * s[3] + w.coh * s[4];
    return 100.0 * num / weight_sum;
}

ScsFeatures scs_features(const AudioBuffer& audio) {
    // Peak-normalize so the report depends on structure, not playback gain.
    float peak = 0.0f;
    for (float s : audio.samples) peak = std::max(peak, std::abs(s));
    AudioBuffer leveled = audio;
    if (peak > 0.0f) {
        const float gain = 0.9f / peak;
        for (float& s : leveled.samples) s *= gain;
    }

    ScsFeatures f;
    f.mel = mel_spectrogram(leveled);
    f.envelope = onset_envelope(f.mel);
    f.ssm = self_similarity(f.mel);
    f.frames_per_second = f.mel.frames_per_second();
    f.novelty =
        novelty_curve(f.ssm, novelty_kernel_frames(f.mel.frames, f.frames_per_second));
    return f;
}

double scs_beat(const ScsFeatures& f, std::vector<std::string>& flags) {
    const double period = global_beat_period(f.envelope, f.frames_per_second);
    const std::vector<int> peaks = onset_peaks(f.envelope);
    if (period <= 0.0 || peaks.empty()) {
        flags.push_back("beat_no_onsets");
        return 0.0;
    }
    // Mean resultant length of peak phases modulo the beat period.
    std::complex<double> acc{0.0, 0.0};
    for (int t : peaks) {
        const double phase = 2.0 * std::numbers::pi * std::fmod(t, period) / period;
        acc += std::complex<double>{std::cos(phase), std::sin(phase)};
    }
    return std::abs(acc) / peaks.size();
}

double scs_tempo(const ScsFeatures& f, std::vector<std::string>& flags) {
    std::vector<TempoEstimate> estimates;
    try {
        estimates = tempo_estimates(f.envelope, f.frames_per_second, kTempoWindowSeconds,
                                    kTempoHopSeconds);
    } catch (const DomainError&) {
        flags.push_back("tempo_degenerate");
        return 0.0;
    }
    if (estimates.size() < 2) {
        flags.push_back("tempo_degenerate");
        return 0.0;
    }
    double mean = 0.0;
    for (const TempoEstimate& e : estimates) mean += e.bpm;
    mean /= estimates.size();
    double var = 0.0;
    for (const TempoEstimate& e : estimates) var += (e.bpm - mean) * (e.bpm - mean);
    var /= estimates.size();
    const double cv = std::sqrt(var) / mean;
    return std::max(0.0, 1.0 - cv / kTempoCvFullPenalty);
}

double scs_bound(const ScsFeatures& f, std::vector<std::string>& flags) {
    double med = 0.0;
    const int kernel = novelty_kernel_frames(f.mel.frames, f.frames_per_second);
    const std::vector<int> peaks = qualifying_novelty_peaks(f.novelty, kernel, med);
    if (peaks.empty()) {
        flags.push_back("bound_no_peaks");
        return 0.0;
    }
    double acc = 0.0;
    for (int t : peaks) {
        acc += (f.novelty[t] - med) / (f.novelty[t] + med);
    }
    return acc / peaks.size();
}

double scs_recur(const ScsFeatures& f, std::vector<std::string>& flags) {
    const int t_count = f.ssm.size;
    const int lag_min = static_cast<int>(std::ceil(kRecurrenceMinLagSeconds * f.frames_per_second));
    const int lag_max = t_count / 2;
    if (lag_min > lag_max) {
        flags.push_back("recur_too_short");
        return 0.0;
    }

    // Every pair of frames from one source shares a baseline similarity
    // (stationary noise sits near 0.85), so recurrence is scored as the best
    // lag diagonal's exceedance over the typical far-pair similarity.
    double baseline = 0.0;
    long baseline_n = 0;
    for (int i = 0; i < t_count; ++i) {
        for (int j = i + lag_min; j < t_count; ++j) {
            baseline += f.ssm.at(i, j);
            ++baseline_n;
        }
    }
    if (baseline_n == 0) {
        flags.push_back("recur_too_short");
        return 0.0;
    }
    baseline /= baseline_n;

    double best = 0.0;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
        double acc = 0.0;
        for (int i = 0; i + lag < t_count; ++i) acc += f.ssm.at(i, i + lag);
        best = std::max(best, acc / (t_count - lag));
    }
    if (baseline >= 1.0) return 0.0;
    return std::clamp((best - baseline) / (1.0 - baseline), 0.0, 1.0);
}

double scs_coh(const ScsFeatures& f, std::vector<std::string>& flags) {
    double med = 0.0;
    const int kernel = novelty_kernel_frames(f.mel.frames, f.frames_per_second);
    const std::vector<int> boundaries = qualifying_novelty_peaks(f.novelty, kernel, med);
    if (boundaries.empty()) {
        flags.push_back("coh_single_segment");
        return 0.0;
    }

    const int t_count = f.ssm.size;
    std::vector<int> segment_of(t_count);
    int seg = 0;
    size_t next = 0;
    for (int t = 0; t < t_count; ++t) {
        if (next < boundaries.size() && t >= boundaries[next]) {
            ++seg;
            ++next;
        }
        segment_of[t] = seg;
    }
    const int segments = seg + 1;
    if (segments < 2) {
        flags.push_back("coh_single_segment");
        return 0.0;
    }

    std::vector<double> seg_count(segments, 0.0);
    for (int t = 0; t < t_count; ++t) seg_count[segment_of[t]] += 1.0;

    // Similarity block sums per segment pair; distances are 1 - similarity.
    std::vector<double> sim_sum(static_cast<size_t>(segments) * segments, 0.0);
    for (int i = 0; i < t_count; ++i) {
        const int a = segment_of[i];
        for (int j = 0; j < t_count; ++j) {
            sim_sum[static_cast<size_t>(a) * segments + segment_of[j]] += f.ssm.at(i, j);
        }
    }

    double within_dist = 0.0, within_pairs = 0.0;
    double between_dist = 0.0, between_pairs = 0.0;
    for (int a = 0; a < segments; ++a) {
        for (int b = 0; b < segments; ++b) {
            const double pairs = seg_count[a] * seg_count[b];
            const double dist = pairs - sim_sum[static_cast<size_t>(a) * segments + b];
            if (a == b) {
                within_dist += dist; // diagonal contributes zero distance
                within_pairs += pairs - seg_count[a];
            } else {
                between_dist += dist;
                between_pairs += pairs;
            }
        }
    }
    if (within_pairs <= 0.0 || between_pairs <= 0.0) {
        flags.push_back("coh_degenerate");
        return 0.0;
    }
    const double d_within = within_dist / within_pairs;
    const double d_between = between_dist / between_pairs;
    if (d_within + d_between <= 0.0) {
        flags.push_back("coh_degenerate");
        return 0.0;
    }
    return std::clamp((d_between - d_within) / (d_between + d_within), 0.0, 1.0);
}

ScsReport scs(const AudioBuffer& audio, const ScsWeights& weights) {
    if (weights.beat < 0 || weights.tempo < 0 || weights.bound < 0 || weights.recur < 0 ||
        weights.coh < 0) {
        throw DomainError("ZeroWeights", "weights must be nonnegative");
    }
    if (!(weights.sum() > 0.0)) {
        throw DomainError("ZeroWeights", "weight sum must be positive");
    }
    if (audio.duration() < kScsMinSeconds) {
        throw DomainError("AudioTooShort", "need at least 8 s of audio");
    }

    const ScsFeatures f = scs_features(audio);
    ScsReport report;
    report.weights = weights;
    report.s_beat = scs_beat(f, report.flags);
    report.s_tempo = scs_tempo(f, report.flags);
    report.s_bound = scs_bound(f, report.flags);
    report.s_recur = scs_recur(f, report.flags);
    report.s_coh = scs_coh(f, report.flags);
    report.total = scs_total(
        {report.s_beat, report.s_tempo, report.s_bound, report.s_recur, report.s_coh},
        weights);
    return report;
}

} // namespace plankit
