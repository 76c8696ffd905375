#include <cmath>
#include <numbers>

#include "plankit/audio.hpp"
#include "plankit/error.hpp"

namespace plankit {

namespace {

constexpr int kHalfTaps = 24; // kernel half-width at the output rate

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Blackman-windowed sinc, cutoff slightly below the narrower Nyquist.
// Per-sample kernel normalization keeps DC gain at exactly 1.
float resample_one(const std::vector<float>& x, double pos, double cutoff, double half_width) {
    const long first = static_cast<long>(std::ceil(pos - half_width));
    const long last = static_cast<long>(std::floor(pos + half_width));
    double acc = 0.0;
    double weight_sum = 0.0;
    for (long k = first; k <= last; ++k) {
        const double t = pos - k;
        const double window_arg = t / half_width; // in [-1, 1]
        const double w = 0.42 + 0.5 * std::cos(std::numbers::pi * window_arg) +
                         0.08 * std::cos(2.0 * std::numbers::pi * window_arg);
        const double h = 2.0 * cutoff * sinc(2.0 * cutoff * t) * w;
        weight_sum += h;
        if (k >= 0 && k < static_cast<long>(x.size())) {
            acc += h * x[k];
        }
    }
    return weight_sum != 0.0 ? static_cast<float>(acc / weight_sum) : 0.0f;
}

AudioBuffer resample_impl(const AudioBuffer& in, double target_rate, bool parallel) {
    if (target_rate <= 0.0) throw DomainError("InvalidArgument", "target rate must be positive");
    if (in.sample_rate == target_rate) return in;
    if (in.samples.empty()) return AudioBuffer{{}, target_rate};

    const double ratio = target_rate / in.sample_rate;
    const double cutoff = 0.5 * std::min(1.0, ratio) * 0.92;
    const double half_width = kHalfTaps / std::min(1.0, ratio);
    const long out_count = static_cast<long>(std::llround(in.samples.size() * ratio));

    AudioBuffer out;
    out.sample_rate = target_rate;
    out.samples.resize(out_count);

#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < out_count; ++i) {
        out.samples[i] = resample_one(in.samples, i / ratio, cutoff, half_width);
    }
    return out;
}

} // namespace

AudioBuffer resample(const AudioBuffer& in, double target_rate) {
    return resample_impl(in, target_rate, true);
}

AudioBuffer resample_serial(const AudioBuffer& in, double target_rate) {
    return resample_impl(in, target_rate, false);
}

} // namespace plankit
