#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "plankit/audio.hpp"
#include "plankit/error.hpp"

#include "helpers.hpp"

using namespace plankit;
using plankit::testing::sine_wave;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

int zero_crossings(const std::vector<float>& x) {
    int count = 0;
    for (size_t i = 1; i < x.size(); ++i) {
        if ((x[i - 1] < 0.0f) != (x[i] < 0.0f)) ++count;
    }
    return count;
}

} // namespace

TEST_SUITE("audio") {

TEST_CASE("float32 WAV round trip") {
    const AudioBuffer original = sine_wave(440.0, 0.5, 0.8);
    const std::string path = temp_path("plankit_f32.wav");
    write_wav(original, path);
    const AudioBuffer back = read_wav(path);
    REQUIRE(back.sample_rate == original.sample_rate);
    REQUIRE(back.samples == original.samples);
    std::remove(path.c_str());
}

TEST_CASE("PCM16 round trip within quantization error") {
    const AudioBuffer original = sine_wave(440.0, 0.25, 0.8);
    const std::string path = temp_path("plankit_pcm.wav");
    write_wav(original, path, WavEncoding::Pcm16);
    const AudioBuffer back = read_wav(path);
    REQUIRE(back.samples.size() == original.samples.size());
    for (size_t i = 0; i < back.samples.size(); ++i) {
        REQUIRE(back.samples[i] == doctest::Approx(original.samples[i]).epsilon(1e-3));
    }
    std::remove(path.c_str());
}

TEST_CASE("stereo input is averaged to mono") {
    // Hand-written stereo PCM16 file: L = 0.5, R = -0.5 -> mono 0.
    const std::string path = temp_path("plankit_stereo.wav");
    {
        std::ofstream out(path, std::ios::binary);
        auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
        auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
        out.write("RIFF", 4);
        u32(36 + 16);
        out.write("WAVE", 4);
        out.write("fmt ", 4);
        u32(16);
        u16(1);
        u16(2);
        u32(8000);
        u32(8000 * 4);
        u16(4);
        u16(16);
        out.write("data", 4);
        u32(16);
        for (int i = 0; i < 4; ++i) {
            u16(static_cast<std::uint16_t>(16384));  // L
            u16(static_cast<std::uint16_t>(-16384)); // R
        }
    }
    const AudioBuffer mono = read_wav(path);
    REQUIRE(mono.samples.size() == 4);
    for (float s : mono.samples) CHECK(s == 0.0f);
    CHECK(mono.sample_rate == 8000.0);
    std::remove(path.c_str());
}

TEST_CASE("unreadable and unsupported files raise IoError") {
    CHECK_THROWS_AS(read_wav(temp_path("plankit_missing.wav")), IoError);

    const std::string path = temp_path("plankit_notwav.wav");
    { std::ofstream(path) << "this is not audio"; }
    CHECK_THROWS_AS(read_wav(path), IoError);
    std::remove(path.c_str());
}

TEST_CASE("resampling halves the rate and keeps the pitch") {
    const AudioBuffer at48k = sine_wave(440.0, 1.0, 0.5, 48000.0);
    const AudioBuffer at24k = resample(at48k, 24000.0);
    REQUIRE(at24k.sample_rate == 24000.0);
    REQUIRE(at24k.samples.size() == at48k.samples.size() / 2);

    // 440 Hz for 1 s crosses zero ~880 times regardless of rate.
    CHECK(zero_crossings(at24k.samples) == doctest::Approx(880).epsilon(0.01));

    // interior amplitude is preserved
    float peak = 0.0f;
    for (size_t i = at24k.samples.size() / 4; i < at24k.samples.size() / 2; ++i) {
        peak = std::max(peak, std::abs(at24k.samples[i]));
    }
    CHECK(peak == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("resampling at the same rate is the identity") {
    const AudioBuffer buf = sine_wave(440.0, 0.1);
    CHECK(resample(buf, buf.sample_rate) == buf);
}

TEST_CASE("parallel and serial resamplers agree") {
    const AudioBuffer at48k = sine_wave(997.0, 0.7, 0.9, 48000.0);
    CHECK(resample(at48k, 24000.0) == resample_serial(at48k, 24000.0));
}

TEST_CASE("full-scale 997 Hz sine measures -3.01 LUFS") {
    const AudioBuffer sine = sine_wave(997.0, 3.0, 1.0);
    double lufs = 0.0;
    REQUIRE(integrated_loudness(sine, lufs));
    CHECK(std::abs(lufs - (-3.01)) < 0.05);

    // 20 dB quieter reads 20 LU lower: the meter is gain-linear.
    const AudioBuffer quiet = sine_wave(997.0, 3.0, 0.1);
    double quiet_lufs = 0.0;
    REQUIRE(integrated_loudness(quiet, quiet_lufs));
    CHECK(quiet_lufs == doctest::Approx(lufs - 20.0).epsilon(1e-3));
}

TEST_CASE("loudness is defined at other sample rates too") {
    const AudioBuffer sine = sine_wave(997.0, 3.0, 1.0, 48000.0);
    double lufs = 0.0;
    REQUIRE(integrated_loudness(sine, lufs));
    CHECK(std::abs(lufs - (-3.01)) < 0.05);
}

TEST_CASE("digital silence has undefined loudness") {
    AudioBuffer silence;
    silence.samples.assign(24000 * 2, 0.0f);
    double lufs = 0.0;
    CHECK_FALSE(integrated_loudness(silence, lufs));
    CHECK_THROWS_WITH_AS(normalize_loudness(silence), doctest::Contains("SilentAudio"),
                         DomainError);

    AudioBuffer empty;
    CHECK_THROWS_WITH_AS(normalize_loudness(empty), doctest::Contains("EmptyAudio"),
                         DomainError);
}

TEST_CASE("normalization lands on the target and is gain-only") {
    const AudioBuffer sine = sine_wave(440.0, 3.0, 0.25);
    const AudioBuffer normalized = normalize_loudness(sine);
    double lufs = 0.0;
    REQUIRE(integrated_loudness(normalized, lufs));
    CHECK(std::abs(lufs - (-14.0)) < 0.1);

    // No clamp engaged here, so output / input is one constant.
    const double gain = normalized.samples[1000] / sine.samples[1000];
    for (size_t i = 0; i < sine.samples.size(); ++i) {
        if (std::abs(sine.samples[i]) > 1e-3) {
            REQUIRE(normalized.samples[i] / sine.samples[i] == doctest::Approx(gain).epsilon(1e-5));
        }
    }
}

TEST_CASE("load_and_normalize: 48 kHz stereo in, normalized 24 kHz mono out") {
    const AudioBuffer src = sine_wave(440.0, 2.0, 0.5, 48000.0);
    const std::string path = temp_path("plankit_pipeline.wav");
    write_wav(src, path);

    const AudioBuffer out = load_and_normalize(path);
    CHECK(out.sample_rate == 24000.0);
    double lufs = 0.0;
    REQUIRE(integrated_loudness(out, lufs));
    CHECK(std::abs(lufs - (-14.0)) < 0.1);
    for (float s : out.samples) {
        REQUIRE(s <= 1.0f);
        REQUIRE(s >= -1.0f);
    }
    std::remove(path.c_str());
}

} // TEST_SUITE
