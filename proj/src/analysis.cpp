#include "plankit/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "plankit/error.hpp"
#include "plankit/plan.hpp"

namespace plankit {

namespace {

constexpr int kFluxMeanWindow = 33; // ~0.35 s at the default frame rate

// Bins more than this far below the track's peak magnitude are treated as
// silent when differencing, so leakage flutter around the log floor does not
// read as onsets.
constexpr float kFluxGateBelowPeakNats = 8.059047775479163f; // 70 dB
constexpr float kFluxGateFloorLogMag = -6.907755278982137f;  // ln(1e-3)

// Unit-norm, mean-removed copy of every mel column. Columns with no variance
// come back as zero vectors and are flagged.
struct NormalizedFrames {
    int frames = 0;
    int bins = 0;
    std::vector<float> data;
    std::vector<char> is_zero;
};

NormalizedFrames normalize_frames(const MelSpectrogram& mel) {
    NormalizedFrames out;
    out.frames = mel.frames;
    out.bins = mel.bins;
    out.data.resize(static_cast<size_t>(mel.frames) * mel.bins);
    out.is_zero.assign(mel.frames, 0);

#pragma omp parallel for schedule(static)
    for (int t = 0; t < mel.frames; ++t) {
        const float* src = mel.frame(t);
        float* dst = out.data.data() + static_cast<size_t>(t) * mel.bins;
        double mean = 0.0;
        for (int f = 0; f < mel.bins; ++f) mean += src[f];
        mean /= mel.bins;
        double norm_sq = 0.0;
        for (int f = 0; f < mel.bins; ++f) {
            const double v = src[f] - mean;
            dst[f] = static_cast<float>(v);
            norm_sq += v * v;
        }
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-9) {
            std::fill(dst, dst + mel.bins, 0.0f);
            out.is_zero[t] = 1;
        } else {
            const float inv = static_cast<float>(1.0 / norm);
            for (int f = 0; f < mel.bins; ++f) dst[f] *= inv;
        }
    }
    return out;
}

float similarity_from_dot(double dot) {
    const double cosine = std::clamp(dot, -1.0, 1.0);
    return static_cast<float>(0.5 * (cosine + 1.0));
}

float pair_similarity(const NormalizedFrames& nf, int i, int j) {
    if (nf.is_zero[i] || nf.is_zero[j]) {
        return (nf.is_zero[i] && nf.is_zero[j]) ? 1.0f : 0.5f;
    }
    const float* a = nf.data.data() + static_cast<size_t>(i) * nf.bins;
    const float* b = nf.data.data() + static_cast<size_t>(j) * nf.bins;
    double dot = 0.0;
    for (int f = 0; f < nf.bins; ++f) dot += static_cast<double>(a[f]) * b[f];
    return similarity_from_dot(dot);
}

// Checkerboard kernel with Gaussian taper. Center row/column weigh zero.
struct CheckerKernel {
    int half = 0;
    std::vector<float> weights; // (2*half+1)^2, signed, sums of |w| normalized to 1

    float at(int p, int q) const {
        const int side = 2 * half + 1;
        return weights[static_cast<size_t>(p + half) * side + (q + half)];
    }
};

CheckerKernel make_kernel(int kernel_frames) {
    CheckerKernel k;
    k.half = (kernel_frames - 1) / 2;
    const int side = kernel_frames;
    const double sigma = std::max(1.0, kernel_frames / 6.0);
    k.weights.resize(static_cast<size_t>(side) * side);
    double abs_sum = 0.0;
    for (int p = -k.half; p <= k.half; ++p) {
        for (int q = -k.half; q <= k.half; ++q) {
            const int sign = (p == 0 || q == 0) ? 0 : ((p > 0) == (q > 0) ? 1 : -1);
            const double g = std::exp(-(static_cast<double>(p) * p + static_cast<double>(q) * q) /
                                      (2.0 * sigma * sigma));
            const double w = sign * g;
            k.weights[static_cast<size_t>(p + k.half) * side + (q + k.half)] =
                static_cast<float>(w);
            abs_sum += std::abs(w);
        }
    }
    if (abs_sum > 0.0) {
        for (float& w : k.weights) w = static_cast<float>(w / abs_sum);
    }
    return k;
}

// Positions closer than half a kernel to either edge cannot host a full
// checkerboard; they report zero rather than a one-quadrant artifact.
float novelty_at(const SimilarityMatrix& ssm, const CheckerKernel& kernel, int t) {
    if (t < kernel.half || t + kernel.half >= ssm.size) return 0.0f;
    double acc = 0.0;
    for (int p = -kernel.half; p <= kernel.half; ++p) {
        for (int q = -kernel.half; q <= kernel.half; ++q) {
            const float w = kernel.at(p, q);
            if (w != 0.0f) acc += static_cast<double>(w) * ssm.at(t + p, t + q);
        }
    }
    return static_cast<float>(std::max(acc, 0.0));
}

void check_kernel(const SimilarityMatrix& ssm, int kernel_frames) {
    if (kernel_frames < 3 || kernel_frames % 2 == 0 || kernel_frames > ssm.size) {
        throw DomainError("BadKernel",
                          "kernel must be odd, >= 3 and no larger than the matrix");
    }
}

} // namespace

std::vector<float> onset_envelope(const MelSpectrogram& mel) {
    const int t_count = mel.frames;
    float peak = kFluxGateFloorLogMag;
    for (float v : mel.data) peak = std::max(peak, v);
    const float gate = std::max(kFluxGateFloorLogMag, peak - kFluxGateBelowPeakNats);

    std::vector<float> flux(t_count, 0.0f);
    for (int t = 1; t < t_count; ++t) {
        const float* cur = mel.frame(t);
        const float* prev = mel.frame(t - 1);
        double acc = 0.0;
        for (int f = 0; f < mel.bins; ++f) {
            const double d = std::max(cur[f], gate) - std::max(prev[f], gate);
            if (d > 0.0) acc += d;
        }
        flux[t] = static_cast<float>(acc);
    }

    const int half = kFluxMeanWindow / 2;
    std::vector<float> env(t_count, 0.0f);
    for (int t = 0; t < t_count; ++t) {
        const int lo = std::max(0, t - half);
        const int hi = std::min(t_count - 1, t + half);
        double mean = 0.0;
        for (int i = lo; i <= hi; ++i) mean += flux[i];
        mean /= (hi - lo + 1);
        env[t] = static_cast<float>(std::max(0.0, flux[t] - mean));
    }
    return env;
}

std::vector<TempoEstimate> tempo_estimates(const std::vector<float>& envelope,
                                           double frames_per_second, double window_s,
                                           double hop_s, double bpm_min, double bpm_max) {
    const int n = static_cast<int>(envelope.size());
    const int window = static_cast<int>(std::llround(window_s * frames_per_second));
    const int hop = std::max(1, static_cast<int>(std::llround(hop_s * frames_per_second)));
    const int lag_min =
        std::max(1, static_cast<int>(std::ceil(frames_per_second * 60.0 / bpm_max)));
    const int lag_max = static_cast<int>(std::floor(frames_per_second * 60.0 / bpm_min));

    if (n < window || window < lag_max + 2) {
        throw DomainError("TooShort", "envelope shorter than the analysis window");
    }

    std::vector<TempoEstimate> estimates;
    std::vector<double> x(window);
    for (int start = 0; start + window <= n; start += hop) {
        double mean = 0.0;
        for (int i = 0; i < window; ++i) mean += envelope[start + i];
        mean /= window;
        for (int i = 0; i < window; ++i) x[i] = envelope[start + i] - mean;

        int best_lag = -1;
        double best_ac = 0.0;
        std::vector<double> ac(lag_max + 1, 0.0);
        for (int lag = lag_min; lag <= lag_max; ++lag) {
            double s = 0.0;
            for (int i = 0; i + lag < window; ++i) s += x[i] * x[i + lag];
            ac[lag] = s;
            if (s > best_ac) {
                best_ac = s;
                best_lag = lag;
            }
        }
        if (best_lag < 0 || best_ac <= 0.0) continue; // flat window

        // Parabolic peak refinement for sub-frame lag resolution.
        double lag = best_lag;
        if (best_lag > lag_min && best_lag < lag_max) {
            const double a = ac[best_lag - 1], b = ac[best_lag], c = ac[best_lag + 1];
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) lag += 0.5 * (a - c) / denom;
        }
        estimates.push_back({(start + window / 2.0) / frames_per_second,
                             60.0 * frames_per_second / lag});
    }

    if (estimates.empty()) {
        throw DomainError("NoPeak", "no analysis window produced a tempo peak");
    }
    return estimates;
}

SimilarityMatrix self_similarity(const MelSpectrogram& mel) {
    const NormalizedFrames nf = normalize_frames(mel);
    SimilarityMatrix ssm;
    ssm.size = mel.frames;
    ssm.data.resize(static_cast<size_t>(ssm.size) * ssm.size);

    // Upper triangle plus mirror; entries are independent dot products, so the
    // result does not depend on the thread count.
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < ssm.size; ++i) {
        ssm.at(i, i) = 1.0f;
        for (int j = i + 1; j < ssm.size; ++j) {
            const float s = pair_similarity(nf, i, j);
            ssm.at(i, j) = s;
            ssm.at(j, i) = s;
        }
    }
    return ssm;
}

SimilarityMatrix self_similarity_serial(const MelSpectrogram& mel) {
    const NormalizedFrames nf = normalize_frames(mel);
    SimilarityMatrix ssm;
    ssm.size = mel.frames;
    ssm.data.resize(static_cast<size_t>(ssm.size) * ssm.size);
    for (int i = 0; i < ssm.size; ++i) {
        ssm.at(i, i) = 1.0f;
        for (int j = i + 1; j < ssm.size; ++j) {
            const float s = pair_similarity(nf, i, j);
            ssm.at(i, j) = s;
            ssm.at(j, i) = s;
        }
    }
    return ssm;
}

std::vector<float> novelty_curve(const SimilarityMatrix& ssm, int kernel_frames) {
    check_kernel(ssm, kernel_frames);
    const CheckerKernel kernel = make_kernel(kernel_frames);
    std::vector<float> novelty(ssm.size);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < ssm.size; ++t) {
        novelty[t] = novelty_at(ssm, kernel, t);
    }
    return novelty;
}

std::vector<float> novelty_curve_serial(const SimilarityMatrix& ssm, int kernel_frames) {
    check_kernel(ssm, kernel_frames);
    const CheckerKernel kernel = make_kernel(kernel_frames);
    std::vector<float> novelty(ssm.size);
    for (int t = 0; t < ssm.size; ++t) {
        novelty[t] = novelty_at(ssm, kernel, t);
    }
    return novelty;
}

} // namespace plankit
