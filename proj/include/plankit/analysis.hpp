#pragma once

#include <vector>

#include "plankit/mel.hpp"
#include "plankit/plan.hpp"

namespace plankit {

// Spectral flux onset strength: half-wave-rectified log-mel difference summed
// over bins, local-mean subtracted, clamped at zero. One value per mel frame.
std::vector<float> onset_envelope(const MelSpectrogram& mel);

struct TempoEstimate {
    double time_s = 0.0; // center of the analysis window
    double bpm = 0.0;
};

inline constexpr double kTempoMinBpm = 40.0;

// Windowed tempo estimates from the autocorrelation peak of the onset
// envelope, searched over lags for kTempoMinBpm..kBetaMax.
// Throws TooShort when the envelope cannot fit one window, NoPeak when no
// window has a usable peak.
std::vector<TempoEstimate> tempo_estimates(const std::vector<float>& envelope,
                                           double frames_per_second, double window_s,
                                           double hop_s, double bpm_min = kTempoMinBpm,
                                           double bpm_max = kBetaMax);

// Symmetric T x T matrix in [0, 1], unit diagonal.
struct SimilarityMatrix {
    int size = 0;
    std::vector<float> data;

    float at(int i, int j) const { return data[static_cast<size_t>(i) * size + j]; }
    float& at(int i, int j) { return data[static_cast<size_t>(i) * size + j]; }
};

// Cosine similarity of mean-removed mel columns, mapped from [-1, 1] to
// [0, 1]. O(T^2 * F); the parallel kernel computes the upper triangle and
// mirrors it.
SimilarityMatrix self_similarity(const MelSpectrogram& mel);
SimilarityMatrix self_similarity_serial(const MelSpectrogram& mel);

// Gaussian-tapered checkerboard correlation along the diagonal, zero-padded
// at the edges and clamped at zero. Kernel size must be odd, >= 3, <= T.
std::vector<float> novelty_curve(const SimilarityMatrix& ssm, int kernel_frames);
std::vector<float> novelty_curve_serial(const SimilarityMatrix& ssm, int kernel_frames);

} // namespace plankit
