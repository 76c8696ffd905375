#include "plankit/synth.hpp"

#include <cmath>
#include <numbers>

#include "plankit/error.hpp"

namespace plankit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEdgeSeconds = 0.005; // cosine rise/fall inside each bar

constexpr double kKickGain = 0.85;
constexpr double kSnareGain = 0.7;
constexpr double kHatGain = 0.5;
constexpr double kPadGain = 0.5;

constexpr double kKickHz = 50.0, kKickDecay = 0.020, kKickLength = 0.080;
constexpr double kSnareDecay = 0.015, kSnareLength = 0.060;
constexpr double kHatDecay = 0.008, kHatLength = 0.025;

// Counter-based generator so each bar owns an independent, reproducible
// noise stream regardless of what the rest of the plan looks like.
struct NoiseStream {
    std::uint64_t state;

    explicit NoiseStream(std::uint64_t seed, int bar) {
        state = (seed + 0x9E3779B97F4A7C15ull) ^
                (static_cast<std::uint64_t>(bar) * 0xD1B54A32D192ED03ull);
    }

    std::uint64_t next_bits() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [-1, 1).
    double next() { return (next_bits() >> 11) * (2.0 / 9007199254740992.0) - 1.0; }
};

// RBJ biquads, unit peak gain for the bandpass.
struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0, z2 = 0.0;

    double step(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
};

Biquad make_bandpass(double fs, double f0, double q) {
    const double w0 = kTwoPi * f0 / fs;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    return Biquad{alpha / a0, 0.0, -alpha / a0, -2.0 * std::cos(w0) / a0,
                  (1.0 - alpha) / a0};
}

Biquad make_highpass(double fs, double f0, double q) {
    const double w0 = kTwoPi * f0 / fs;
    const double cw = std::cos(w0);
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    return Biquad{(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0,
                  -2.0 * cw / a0, (1.0 - alpha) / a0};
}

const std::array<GrooveTemplate, kGrooveCount>& all_templates() {
    using I = GrooveHit::Instrument;
    static const std::array<GrooveTemplate, kGrooveCount> templates = {{
        {Groove::FourFloor,
         {{0.0, I::Kick, 1.0}, {0.5, I::Hat, 0.5}, {1.0, I::Kick, 0.9}, {1.5, I::Hat, 0.5},
          {2.0, I::Kick, 1.0}, {2.5, I::Hat, 0.5}, {3.0, I::Kick, 0.9}, {3.5, I::Hat, 0.5}}},
        {Groove::Backbeat,
         {{0.0, I::Kick, 1.0}, {0.5, I::Hat, 0.45}, {1.0, I::Snare, 0.9}, {1.5, I::Hat, 0.45},
          {2.0, I::Kick, 0.95}, {2.5, I::Hat, 0.45}, {3.0, I::Snare, 0.9}, {3.5, I::Hat, 0.45}}},
        {Groove::HalfTime,
         {{0.0, I::Kick, 1.0}, {1.0, I::Hat, 0.5}, {2.0, I::Snare, 0.95}, {3.0, I::Hat, 0.5}}},
        {Groove::DoubleTime,
         {{0.0, I::Kick, 1.0}, {0.5, I::Snare, 0.75}, {1.0, I::Kick, 0.9}, {1.5, I::Snare, 0.75},
          {2.0, I::Kick, 1.0}, {2.5, I::Snare, 0.75}, {3.0, I::Kick, 0.9}, {3.5, I::Snare, 0.75}}},
        {Groove::Shuffle,
         {{0.0, I::Kick, 1.0}, {2.0 / 3.0, I::Hat, 0.5}, {1.0, I::Snare, 0.85},
          {1.0 + 2.0 / 3.0, I::Hat, 0.5}, {2.0, I::Kick, 0.95}, {2.0 + 2.0 / 3.0, I::Hat, 0.5},
          {3.0, I::Snare, 0.85}, {3.0 + 2.0 / 3.0, I::Hat, 0.5}}},
        {Groove::Offbeat,
         {{0.0, I::Kick, 0.9}, {0.5, I::Snare, 0.8}, {1.5, I::Snare, 0.8},
          {2.0, I::Kick, 0.9}, {2.5, I::Snare, 0.8}, {3.5, I::Snare, 0.8}}},
        {Groove::Breakbeat,
         {{0.0, I::Kick, 1.0}, {0.5, I::Hat, 0.45}, {1.0, I::Snare, 0.9}, {1.75, I::Kick, 0.8},
          {2.25, I::Kick, 0.7}, {2.5, I::Hat, 0.45}, {3.0, I::Snare, 0.9}, {3.75, I::Hat, 0.5}}},
        {Groove::Sparse, {{0.0, I::Kick, 1.0}, {2.0, I::Snare, 0.8}}},
    }};
    return templates;
}

// Harmonic amplitude lists and pad register per section; distinct pairs give
// each section its own timbre so section changes are visible in the
// spectrogram.
const std::vector<double>& section_overtones(Section s) {
    static const std::array<std::vector<double>, kSectionCount> sets = {{
        {1.0},                    // intro
        {1.0, 0.4},               // verse
        {1.0, 0.5, 0.2},          // prechorus
        {1.0, 0.6, 0.35, 0.2},    // chorus
        {1.0, 0.0, 0.45},         // bridge
        {1.0, 0.25},              // breakdown
        {1.0, 0.3},               // outro
        {1.0, 0.5, 0.3},          // fill
    }};
    return sets[static_cast<int>(s)];
}

int section_octave_shift(Section s) {
    static const std::array<int, kSectionCount> shifts = {{
        0,  // intro
        0,  // verse
        1,  // prechorus
        1,  // chorus
        -1, // bridge
        -1, // breakdown
        0,  // outro
        1,  // fill
    }};
    return shifts[static_cast<int>(s)];
}

void add_kick(std::vector<double>& buf, long at, double fs, double velocity) {
    const long len = std::min<long>(std::llround(kKickLength * fs),
                                    static_cast<long>(buf.size()) - at);
    for (long i = 0; i < len; ++i) {
        const double t = i / fs;
        buf[at + i] += kKickGain * velocity * std::sin(kTwoPi * kKickHz * t) *
                       std::exp(-t / kKickDecay);
    }
}

void add_snare(std::vector<double>& buf, long at, double fs, double velocity,
               NoiseStream& noise) {
    Biquad bp = make_bandpass(fs, 1800.0, 1.2);
    const long len = std::min<long>(std::llround(kSnareLength * fs),
                                    static_cast<long>(buf.size()) - at);
    for (long i = 0; i < len; ++i) {
        const double t = i / fs;
        buf[at + i] += kSnareGain * velocity * bp.step(noise.next()) * std::exp(-t / kSnareDecay);
    }
}

void add_hat(std::vector<double>& buf, long at, double fs, double velocity,
             NoiseStream& noise) {
    Biquad hp = make_highpass(fs, 6000.0, 0.707);
    const long len = std::min<long>(std::llround(kHatLength * fs),
                                    static_cast<long>(buf.size()) - at);
    for (long i = 0; i < len; ++i) {
        const double t = i / fs;
        buf[at + i] += kHatGain * velocity * hp.step(noise.next()) * std::exp(-t / kHatDecay);
    }
}

// One bar into out[start..start+len). Everything the bar needs is local to
// the bar, so bars can render in any order or in parallel.
void render_bar(const StructuralPlan& plan, int bar, const RenderConfig& config,
                double bar_start_s, double bar_duration_s, float* out, long len) {
    const BarAttributes& attrs = plan.bars[bar - 1];
    const double fs = config.sample_rate;
    const int beats = plan.grid.meter.numerator;
    const double beat_s = bar_duration_s / beats;

    std::vector<double> buf(len, 0.0);
    (void)bar_start_s;

    NoiseStream noise(config.seed, bar);
    for (const GrooveHit& hit : groove_hits_for_bar(attrs.groove, beats)) {
        const long at = std::llround(hit.beat_offset * beat_s * fs);
        if (at < 0 || at >= len) continue;
        switch (hit.instrument) {
            case GrooveHit::Instrument::Kick: add_kick(buf, at, fs, hit.velocity); break;
            case GrooveHit::Instrument::Snare: add_snare(buf, at, fs, hit.velocity, noise); break;
            case GrooveHit::Instrument::Hat: add_hat(buf, at, fs, hit.velocity, noise); break;
        }
    }

    if (attrs.harmony) {
        std::vector<double> freqs = chord_frequencies(*attrs.harmony);
        const double octave = std::pow(2.0, section_octave_shift(attrs.section));
        for (double& f : freqs) f *= octave;
        const std::vector<double>& overtones = section_overtones(attrs.section);
        double amp_sum = 0.0;
        for (double o : overtones) amp_sum += o;
        const double scale = kPadGain / (amp_sum * freqs.size());
        for (double f : freqs) {
            for (size_t h = 0; h < overtones.size(); ++h) {
                if (overtones[h] <= 0.0) continue;
                const double fh = f * (h + 1);
                if (fh >= fs / 2.0) continue; // keep the pad band-limited
                const double amp = scale * overtones[h];
                for (long i = 0; i < len; ++i) {
                    buf[i] += amp * std::sin(kTwoPi * fh * (i / fs));
                }
            }
        }
    }

    // Per-bar energy envelope with cosine edges fully inside the bar.
    const double level = config.energy_amplitude[attrs.energy] * config.master_gain;
    long edge = std::llround(kEdgeSeconds * fs);
    edge = std::min(edge, len / 2);
    for (long i = 0; i < len; ++i) {
        double env = level;
        if (i < edge) {
            env *= 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 1) / (edge + 1)));
        } else if (i >= len - edge) {
            env *= 0.5 * (1.0 - std::cos(std::numbers::pi * (len - i) / (edge + 1)));
        }
        out[i] = static_cast<float>(buf[i] * env);
    }
}

AudioBuffer render_plan_impl(const StructuralPlan& plan, const RenderConfig& config,
                             bool parallel) {
    require_valid(plan);
    const double fs = config.sample_rate;
    const std::vector<double> downbeats = downbeat_times(plan.grid);
    const double total = total_duration(plan);

    AudioBuffer out;
    out.sample_rate = fs;
    out.samples.assign(static_cast<size_t>(std::llround(total * fs)), 0.0f);

    const int bars = plan.bar_count();
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int bar = 1; bar <= bars; ++bar) {
        const long start = std::llround(downbeats[bar - 1] * fs);
        const long end = (bar < bars) ? std::llround(downbeats[bar] * fs)
                                      : static_cast<long>(out.samples.size());
        if (end <= start) continue;
        render_bar(plan, bar, config, downbeats[bar - 1],
                   bar_duration(plan.grid, bar), out.samples.data() + start, end - start);
    }
    return out;
}

} // namespace

const GrooveTemplate& groove_template(Groove id) {
    return all_templates()[static_cast<int>(id)];
}

std::vector<GrooveHit> groove_hits_for_bar(Groove id, int beats) {
    std::vector<GrooveHit> hits;
    const GrooveTemplate& tpl = groove_template(id);
    for (int cycle = 0; cycle * 4 < beats; ++cycle) {
        for (const GrooveHit& hit : tpl.hits) {
            const double offset = hit.beat_offset + 4.0 * cycle;
            if (offset < beats) {
                hits.push_back({offset, hit.instrument, hit.velocity});
            }
        }
    }
    return hits;
}

std::vector<double> chord_frequencies(const HarmonyCode& chord) {
    std::vector<double> freqs;
    const std::vector<int> pcs = chord_pitch_classes(chord);
    // Root in octave 3, chord tones stacked upward from it.
    const int root_midi = 48 + pcs[0];
    int prev = root_midi;
    for (size_t i = 0; i < pcs.size(); ++i) {
        int midi = 48 + pcs[i];
        while (midi < prev) midi += 12;
        prev = midi;
        freqs.push_back(440.0 * std::pow(2.0, (midi - 69) / 12.0));
    }
    return freqs;
}

std::vector<int> chord_pitch_classes(const HarmonyCode& chord) {
    static const int major_scale[7] = {0, 2, 4, 5, 7, 9, 11};
    static const int minor_scale[7] = {0, 2, 3, 5, 7, 8, 10};
    const int* scale = chord.key.mode == Mode::Major ? major_scale : minor_scale;
    const int root = (chord.key.tonic + scale[chord.degree - 1]) % 12;

    std::vector<int> intervals;
    switch (chord.quality) {
        case ChordQuality::Major: intervals = {0, 4, 7}; break;
        case ChordQuality::Minor: intervals = {0, 3, 7}; break;
        case ChordQuality::Diminished: intervals = {0, 3, 6}; break;
        case ChordQuality::Dominant7: intervals = {0, 4, 7, 10}; break;
    }
    std::vector<int> pcs;
    for (int iv : intervals) pcs.push_back((root + iv) % 12);
    return pcs;
}

AudioBuffer render_plan(const StructuralPlan& plan, const RenderConfig& config) {
    return render_plan_impl(plan, config, true);
}

AudioBuffer render_plan_serial(const StructuralPlan& plan, const RenderConfig& config) {
    return render_plan_impl(plan, config, false);
}

AudioBuffer render_click(double bpm, int bars, Meter meter, const RenderConfig& config) {
    if (!(bpm > 0.0) || bpm > kBetaMax) {
        throw DomainError("InvalidPayload", "click tempo outside (0, beta_max]");
    }
    if (bars < 1 || meter.numerator < 1) {
        throw DomainError("InvalidPayload", "need at least one bar and one beat");
    }
    const double fs = config.sample_rate;
    const double beat_s = 60.0 / bpm;
    const double total = bars * meter.numerator * beat_s;

    AudioBuffer out;
    out.sample_rate = fs;
    out.samples.assign(static_cast<size_t>(std::llround(total * fs)), 0.0f);

    const long click_len = std::llround(0.015 * fs);
    for (int bar = 0; bar < bars; ++bar) {
        for (int beat = 0; beat < meter.numerator; ++beat) {
            const bool accent = beat == 0;
            const double freq = accent ? 1500.0 : 1000.0;
            const double amp = (accent ? 0.8 : 0.5) * config.master_gain;
            const long at = std::llround((bar * meter.numerator + beat) * beat_s * fs);
            const long len = std::min<long>(click_len, out.samples.size() - at);
            for (long i = 0; i < len; ++i) {
                const double t = i / fs;
                out.samples[at + i] += static_cast<float>(
                    amp * std::sin(kTwoPi * freq * t) * std::exp(-t / 0.005));
            }
        }
    }
    return out;
}

} // namespace plankit
