#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "plankit/audio.hpp"
#include "plankit/error.hpp"

namespace plankit {

namespace {

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

// K-weighting stage 1: spherical-head high shelf. Coefficients are derived
// from the analog prototype so any sample rate lands on the same response.
Biquad make_shelf(double fs) {
    const double db = 3.999843853973347;
    const double f0 = 1681.974450955533;
    const double q = 0.7071752369554196;

    const double k = std::tan(std::numbers::pi * f0 / fs);
    const double vh = std::pow(10.0, db / 20.0);
    const double vb = std::pow(vh, 0.4996667741545416);
    const double a0 = 1.0 + k / q + k * k;
    return Biquad{
        (vh + vb * k / q + k * k) / a0,
        2.0 * (k * k - vh) / a0,
        (vh - vb * k / q + k * k) / a0,
        2.0 * (k * k - 1.0) / a0,
        (1.0 - k / q + k * k) / a0,
    };
}

// K-weighting stage 2: RLB high-pass.
Biquad make_highpass(double fs) {
    const double f0 = 38.13547087602444;
    const double q = 0.5003270373238773;

    const double k = std::tan(std::numbers::pi * f0 / fs);
    const double a0 = 1.0 + k / q + k * k;
    return Biquad{
        1.0,
        -2.0,
        1.0,
        2.0 * (k * k - 1.0) / a0,
        (1.0 - k / q + k * k) / a0,
    };
}

constexpr double kAbsoluteGateLufs = -70.0;
constexpr double kLoudnessOffset = -0.691;

double block_loudness(double mean_power) {
    return kLoudnessOffset + 10.0 * std::log10(mean_power);
}

} // namespace

bool integrated_loudness(const AudioBuffer& audio, double& lufs_out) {
    const double fs = audio.sample_rate;
    const size_t n = audio.samples.size();
    const size_t block = static_cast<size_t>(std::llround(0.4 * fs));
    const size_t step = static_cast<size_t>(std::llround(0.1 * fs));
    if (block == 0 || n < block) return false;

    // K-weighted squared signal, then prefix sums for O(1) block powers.
    Biquad shelf = make_shelf(fs);
    Biquad hp = make_highpass(fs);
    std::vector<double> prefix(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double y = hp.step(shelf.step(audio.samples[i]));
        prefix[i + 1] = prefix[i] + y * y;
    }

    std::vector<double> block_powers;
    for (size_t start = 0; start + block <= n; start += step) {
        block_powers.push_back((prefix[start + block] - prefix[start]) / block);
    }

    // Absolute gate at -70 LUFS.
    double sum = 0.0;
    size_t count = 0;
    for (double p : block_powers) {
        if (p > 0.0 && block_loudness(p) > kAbsoluteGateLufs) {
            sum += p;
            ++count;
        }
    }
    if (count == 0) return false;

    // Relative gate 10 LU below the absolute-gated mean.
    const double relative_threshold = block_loudness(sum / count) - 10.0;
    sum = 0.0;
    count = 0;
    for (double p : block_powers) {
        if (p > 0.0 && block_loudness(p) > kAbsoluteGateLufs &&
            block_loudness(p) > relative_threshold) {
            sum += p;
            ++count;
        }
    }
    if (count == 0) return false;

    lufs_out = block_loudness(sum / count);
    return true;
}

AudioBuffer normalize_loudness(const AudioBuffer& audio, double target_lufs) {
    if (audio.samples.empty()) {
        throw DomainError("EmptyAudio", "no samples to normalize");
    }
    double lufs = 0.0;
    if (!integrated_loudness(audio, lufs)) {
        throw DomainError("SilentAudio", "integrated loudness is undefined");
    }
    const double gain = std::pow(10.0, (target_lufs - lufs) / 20.0);
    AudioBuffer out;
    out.sample_rate = audio.sample_rate;
    out.samples.resize(audio.samples.size());
    for (size_t i = 0; i < audio.samples.size(); ++i) {
        const double v = audio.samples[i] * gain;
        out.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
    return out;
}

AudioBuffer load_and_normalize(const std::string& path) {
    AudioBuffer audio = read_wav(path);
    if (audio.samples.empty()) {
        throw DomainError("EmptyAudio", "no samples in " + path);
    }
    audio = resample(audio, kPipelineSampleRate);
    return normalize_loudness(audio);
}

} // namespace plankit
