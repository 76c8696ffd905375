#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "plankit/audio.hpp"
#include "plankit/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace plankit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

template <typename T>
T read_le(std::istream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated WAV file: " + path);
    return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

} // namespace

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);

    char riff[4], wave[4];
    in.read(riff, 4);
    read_le<std::uint32_t>(in, path); // RIFF size, unused
    in.read(wave, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
        throw IoError("not a RIFF/WAVE file: " + path);
    }

    FmtChunk fmt;
    bool have_fmt = false;
    std::vector<char> payload;
    bool have_data = false;

    while (in && !(have_fmt && have_data)) {
        char id[4];
        in.read(id, 4);
        if (!in) break;
        const std::uint32_t size = read_le<std::uint32_t>(in, path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw IoError("malformed fmt chunk: " + path);
            fmt.format = read_le<std::uint16_t>(in, path);
            fmt.channels = read_le<std::uint16_t>(in, path);
            fmt.sample_rate = read_le<std::uint32_t>(in, path);
            read_le<std::uint32_t>(in, path); // byte rate
            read_le<std::uint16_t>(in, path); // block align
            fmt.bits_per_sample = read_le<std::uint16_t>(in, path);
            in.seekg(size - 16 + (size & 1), std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            payload.resize(size);
            in.read(payload.data(), size);
            if (!in) throw IoError("truncated data chunk: " + path);
            have_data = true;
        } else {
            in.seekg(size + (size & 1), std::ios::cur); // chunks are word-aligned
        }
    }
    if (!have_fmt || !have_data) throw IoError("missing fmt or data chunk: " + path);

    const bool pcm16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
    const bool float32 = fmt.format == kFormatFloat && fmt.bits_per_sample == 32;
    if (!pcm16 && !float32) {
        throw IoError("UnsupportedFormat: only PCM16 and float32 WAV are readable: " + path);
    }
    if (fmt.channels < 1 || fmt.channels > 2) {
        throw IoError("UnsupportedFormat: only mono or stereo WAV is readable: " + path);
    }
    if (fmt.sample_rate == 0) throw IoError("UnsupportedFormat: zero sample rate: " + path);

    const int channels = fmt.channels;
    const size_t bytes_per_sample = pcm16 ? 2 : 4;
    const size_t frames = payload.size() / (bytes_per_sample * channels);

    AudioBuffer out;
    out.sample_rate = fmt.sample_rate;
    out.samples.resize(frames);
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const char* p = payload.data() + (i * channels + c) * bytes_per_sample;
            if (pcm16) {
                std::int16_t v;
                std::memcpy(&v, p, 2);
                acc += v / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                acc += v;
            }
        }
        out.samples[i] = static_cast<float>(acc / channels);
    }
    return out;
}

void write_wav(const AudioBuffer& audio, const std::string& path, WavEncoding encoding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);

    const std::uint16_t format = encoding == WavEncoding::Pcm16 ? kFormatPcm : kFormatFloat;
    const std::uint16_t bits = encoding == WavEncoding::Pcm16 ? 16 : 32;
    const std::uint32_t rate = static_cast<std::uint32_t>(audio.sample_rate);
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(audio.samples.size() * bits / 8);

    out.write("RIFF", 4);
    write_le<std::uint32_t>(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_le<std::uint32_t>(out, 16);
    write_le<std::uint16_t>(out, format);
    write_le<std::uint16_t>(out, 1);
    write_le<std::uint32_t>(out, rate);
    write_le<std::uint32_t>(out, rate * bits / 8);
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(bits / 8));
    write_le<std::uint16_t>(out, bits);
    out.write("data", 4);
    write_le<std::uint32_t>(out, data_size);

    if (encoding == WavEncoding::Pcm16) {
        for (float s : audio.samples) {
            const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
            write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(clamped * 32767.0)));
        }
    } else {
        out.write(reinterpret_cast<const char*>(audio.samples.data()), data_size);
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace plankit
