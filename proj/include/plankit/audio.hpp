#pragma once

#include <string>
#include <vector>

namespace plankit {

inline constexpr double kPipelineSampleRate = 24000.0;
inline constexpr double kTargetLufs = -14.0;

// Mono audio, samples nominally in [-1, 1].
struct AudioBuffer {
    std::vector<float> samples;
    double sample_rate = kPipelineSampleRate;

    int frame_count() const { return static_cast<int>(samples.size()); }
    double duration() const { return samples.size() / sample_rate; }

    bool operator==(const AudioBuffer&) const = default;
};

enum class WavEncoding { Pcm16, Float32 };

// RIFF/WAVE reader: PCM16 or float32, 1-2 channels (stereo averaged to mono),
// any sample rate.
AudioBuffer read_wav(const std::string& path);
void write_wav(const AudioBuffer& audio, const std::string& path,
               WavEncoding encoding = WavEncoding::Float32);

// Band-limited sinc resampler.
AudioBuffer resample(const AudioBuffer& in, double target_rate);
AudioBuffer resample_serial(const AudioBuffer& in, double target_rate);

// ITU-R BS.1770 integrated loudness (K-weighted, absolute + relative gating).
// Returns false when loudness is undefined (silence / too short to gate).
bool integrated_loudness(const AudioBuffer& audio, double& lufs_out);

// Gain-only normalization to the target loudness, then peak clamp to [-1, 1].
// Throws SilentAudio when loudness is undefined.
AudioBuffer normalize_loudness(const AudioBuffer& audio, double target_lufs = kTargetLufs);

// Full ingestion pipeline: read, mono, resample to 24 kHz, normalize.
AudioBuffer load_and_normalize(const std::string& path);

} // namespace plankit
