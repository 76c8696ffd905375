#include "plankit/mel.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "plankit/error.hpp"

namespace plankit {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT. The plan is immutable after construction and shared
// read-only across worker threads; each thread brings its own buffer.
struct FftPlan {
    int n;
    std::vector<int> bit_reverse;
    std::vector<std::complex<double>> twiddles; // n/2 roots of unity

    explicit FftPlan(int size) : n(size) {
        bit_reverse.resize(n);
        int bits = 0;
        while ((1 << bits) < n) ++bits;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b) {
                if (i & (1 << b)) r |= 1 << (bits - 1 - b);
            }
            bit_reverse[i] = r;
        }
        twiddles.resize(n / 2);
        for (int k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * k / n;
            twiddles[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    void transform(std::complex<double>* buf) const {
        for (int i = 0; i < n; ++i) {
            const int r = bit_reverse[i];
            if (i < r) std::swap(buf[i], buf[r]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const int stride = n / len;
            for (int start = 0; start < n; start += len) {
                for (int k = 0; k < len / 2; ++k) {
                    const std::complex<double> w = twiddles[k * stride];
                    const std::complex<double> u = buf[start + k];
                    const std::complex<double> v = buf[start + k + len / 2] * w;
                    buf[start + k] = u + v;
                    buf[start + k + len / 2] = u - v;
                }
            }
        }
    }
};

// Sparse triangular filter: weights over a contiguous run of FFT bins.
struct MelFilter {
    int first_bin = 0;
    std::vector<double> weights;
};

std::vector<MelFilter> build_filterbank(const MelParams& p, double sample_rate) {
    const int spectrum_bins = p.fft_size / 2 + 1;
    const double mel_lo = hz_to_mel(p.fmin);
    const double mel_hi = hz_to_mel(p.fmax);
    std::vector<double> edges(p.mel_bins + 2);
    for (int i = 0; i < p.mel_bins + 2; ++i) {
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (p.mel_bins + 1));
    }

    std::vector<MelFilter> bank(p.mel_bins);
    for (int b = 0; b < p.mel_bins; ++b) {
        const double lo = edges[b], center = edges[b + 1], hi = edges[b + 2];
        MelFilter& filter = bank[b];
        filter.first_bin = -1;
        for (int k = 0; k < spectrum_bins; ++k) {
            const double f = k * sample_rate / p.fft_size;
            double w = 0.0;
            if (f > lo && f < hi) {
                w = (f <= center) ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
            }
            if (w > 0.0) {
                if (filter.first_bin < 0) filter.first_bin = k;
                filter.weights.push_back(w);
            } else if (filter.first_bin >= 0) {
                break;
            }
        }
        if (filter.first_bin < 0) filter.first_bin = 0; // degenerate filter, stays empty
    }
    return bank;
}

struct MelContext {
    MelParams params;
    double sample_rate;
    int frames;
    FftPlan plan;
    std::vector<double> window; // periodic Hann
    std::vector<MelFilter> bank;
};

MelContext make_context(const AudioBuffer& audio, const MelParams& p) {
    if (!is_power_of_two(p.fft_size)) {
        throw DomainError("InvalidArgument", "fft_size must be a power of two");
    }
    if (p.hop < 1 || p.mel_bins < 1 || p.fmin < 0 || p.fmax <= p.fmin ||
        p.log_floor <= 0.0) {
        throw DomainError("InvalidArgument", "bad mel parameters");
    }
    const int n = audio.frame_count();
    if (n < p.fft_size) {
        throw DomainError("AudioTooShort",
                          "need at least " + std::to_string(p.fft_size) + " samples");
    }
    MelContext ctx{p, audio.sample_rate, 1 + (n - p.fft_size) / p.hop, FftPlan(p.fft_size),
                   {}, build_filterbank(p, audio.sample_rate)};
    ctx.window.resize(p.fft_size);
    for (int i = 0; i < p.fft_size; ++i) {
        ctx.window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / p.fft_size);
    }
    return ctx;
}

void mel_frame(const MelContext& ctx, const AudioBuffer& audio, int t,
               std::complex<double>* buf, float* out) {
    const MelParams& p = ctx.params;
    const float* src = audio.samples.data() + static_cast<size_t>(t) * p.hop;
    for (int i = 0; i < p.fft_size; ++i) {
        buf[i] = {src[i] * ctx.window[i], 0.0};
    }
    ctx.plan.transform(buf);
    for (int b = 0; b < p.mel_bins; ++b) {
        const MelFilter& filter = ctx.bank[b];
        double acc = 0.0;
        for (size_t k = 0; k < filter.weights.size(); ++k) {
            acc += filter.weights[k] * std::abs(buf[filter.first_bin + k]);
        }
        out[b] = static_cast<float>(std::log(acc + p.log_floor));
    }
}

} // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_center_frequencies(const MelParams& p) {
    const double mel_lo = hz_to_mel(p.fmin);
    const double mel_hi = hz_to_mel(p.fmax);
    std::vector<double> centers(p.mel_bins);
    for (int b = 0; b < p.mel_bins; ++b) {
        centers[b] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (b + 1) / (p.mel_bins + 1));
    }
    return centers;
}

MelSpectrogram mel_spectrogram(const AudioBuffer& audio, const MelParams& params) {
    const MelContext ctx = make_context(audio, params);
    MelSpectrogram out;
    out.bins = params.mel_bins;
    out.frames = ctx.frames;
    out.sample_rate = audio.sample_rate;
    out.params = params;
    out.data.resize(static_cast<size_t>(out.bins) * out.frames);

#pragma omp parallel
    {
        std::vector<std::complex<double>> buf(params.fft_size);
#pragma omp for schedule(static)
        for (int t = 0; t < ctx.frames; ++t) {
            mel_frame(ctx, audio, t, buf.data(), out.data.data() + static_cast<size_t>(t) * out.bins);
        }
    }
    return out;
}

MelSpectrogram mel_spectrogram_serial(const AudioBuffer& audio, const MelParams& params) {
    const MelContext ctx = make_context(audio, params);
    MelSpectrogram out;
    out.bins = params.mel_bins;
    out.frames = ctx.frames;
    out.sample_rate = audio.sample_rate;
    out.params = params;
    out.data.resize(static_cast<size_t>(out.bins) * out.frames);

    std::vector<std::complex<double>> buf(params.fft_size);
    for (int t = 0; t < ctx.frames; ++t) {
        mel_frame(ctx, audio, t, buf.data(), out.data.data() + static_cast<size_t>(t) * out.bins);
    }
    return out;
}

} // namespace plankit
