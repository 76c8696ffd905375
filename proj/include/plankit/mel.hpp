#pragma once

#include <vector>

#include "plankit/audio.hpp"

namespace plankit {

// Defaults are the project-wide analysis constants; change them only via
// explicit flags.
struct MelParams {
    int fft_size = 1024;
    int hop = 256;
    int mel_bins = 128;
    double fmin = 30.0;
    double fmax = 12000.0;
    double log_floor = 1e-5; // epsilon inside the natural log

    bool operator==(const MelParams&) const = default;
};

// Natural-log mel magnitudes, F bins by T frames. Frames are fully interior:
// frame t covers samples [t*hop, t*hop + fft_size), no padding.
struct MelSpectrogram {
    int bins = 0;
    int frames = 0;
    double sample_rate = 0.0;
    MelParams params;
    std::vector<float> data; // frame-major: data[t * bins + f]

    float at(int f, int t) const { return data[static_cast<size_t>(t) * bins + f]; }
    const float* frame(int t) const { return data.data() + static_cast<size_t>(t) * bins; }

    double frames_per_second() const { return sample_rate / params.hop; }
};

MelSpectrogram mel_spectrogram(const AudioBuffer& audio, const MelParams& params = {});
MelSpectrogram mel_spectrogram_serial(const AudioBuffer& audio, const MelParams& params = {});

// Triangle-peak frequency of each mel filter; used for chroma folding.
std::vector<double> mel_center_frequencies(const MelParams& params);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

} // namespace plankit
