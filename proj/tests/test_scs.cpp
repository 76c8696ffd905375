#include <doctest.h>

#include <random>

#include "plankit/error.hpp"
#include "plankit/scs.hpp"
#include "plankit/synth.hpp"

#include "helpers.hpp"

using namespace plankit;
using plankit::testing::make_plan;
using plankit::testing::sine_wave;
using plankit::testing::white_noise;

TEST_SUITE("scs") {

TEST_CASE("aggregation arithmetic") {
    CHECK(scs_total({1, 1, 1, 1, 1}, ScsWeights{}) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(scs_total({1, 0, 1, 0, 1}, ScsWeights{}) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(scs_total({1, 1, 1, 1, 1}, ScsWeights{3, 1, 7, 2, 9}) ==
          doctest::Approx(100.0).epsilon(1e-12));
    CHECK(scs_total({0.5, 0.5, 0.5, 0.5, 0.5}, ScsWeights{2, 2, 2, 2, 2}) ==
          doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("weight rescaling leaves the total unchanged") {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> s_dist(0.0, 1.0);
    std::uniform_real_distribution<double> w_dist(0.01, 5.0);
    std::uniform_real_distribution<double> c_dist(0.1, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::array<double, 5> s{s_dist(rng), s_dist(rng), s_dist(rng), s_dist(rng),
                                      s_dist(rng)};
        ScsWeights w{w_dist(rng), w_dist(rng), w_dist(rng), w_dist(rng), w_dist(rng)};
        const double c = c_dist(rng);
        ScsWeights scaled{w.beat * c, w.tempo * c, w.bound * c, w.recur * c, w.coh * c};
        REQUIRE(std::abs(scs_total(s, w) - scs_total(s, scaled)) < 1e-9);
    }
}

TEST_CASE("input validation") {
    const AudioBuffer audio = sine_wave(440.0, 10.0, 0.5);
    CHECK_THROWS_WITH_AS(scs(audio, ScsWeights{0, 0, 0, 0, 0}),
                         doctest::Contains("ZeroWeights"), DomainError);
    CHECK_THROWS_WITH_AS(scs(audio, ScsWeights{-1, 1, 1, 1, 1}),
                         doctest::Contains("ZeroWeights"), DomainError);
    CHECK_THROWS_WITH_AS(scs(sine_wave(440.0, 4.0)), doctest::Contains("AudioTooShort"),
                         DomainError);
}

TEST_CASE("a click track has tight beat coupling") {
    const AudioBuffer click = render_click(120.0, 8, {4, 4}); // 16 s
    const ScsFeatures f = scs_features(click);
    std::vector<std::string> flags;
    CHECK(scs_beat(f, flags) >= 0.8);
    CHECK(scs_tempo(f, flags) >= 0.9);
}

TEST_CASE("white noise scores poorly on beat and recurrence (20 seeds)") {
    std::vector<double> beats, recurs;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937 rng(200 + seed);
        const AudioBuffer noise = white_noise(20.0, rng, 0.5);

        ScsFeatures f;
        f.mel = mel_spectrogram(noise);
        f.envelope = onset_envelope(f.mel);
        f.ssm = self_similarity(f.mel);
        f.frames_per_second = f.mel.frames_per_second();

        std::vector<std::string> flags;
        beats.push_back(scs_beat(f, flags));
        recurs.push_back(scs_recur(f, flags));
    }
    std::sort(beats.begin(), beats.end());
    std::sort(recurs.begin(), recurs.end());
    CHECK(beats[beats.size() / 2] <= 0.4);
    CHECK(recurs[recurs.size() / 2] <= 0.3);
}

TEST_CASE("one uniform texture has no qualifying boundaries") {
    const AudioBuffer uniform = sine_wave(330.0, 10.0, 0.5);
    ScsReport report = scs(uniform);
    CHECK(report.s_bound == 0.0);
    bool flagged = false;
    for (const std::string& flag : report.flags) {
        flagged = flagged || flag == "bound_no_peaks";
    }
    CHECK(flagged);
}

TEST_CASE("full report on structured oracle audio") {
    StructuralPlan plan = make_plan(16);
    for (int i = 8; i < 16; ++i) plan.bars[i].energy = 5; // louder chorus
    const AudioBuffer audio = render_plan(plan);
    const ScsReport report = scs(audio);

    CHECK(report.total >= 0.0);
    CHECK(report.total <= 100.0);
    const double recomputed = scs_total(
        {report.s_beat, report.s_tempo, report.s_bound, report.s_recur, report.s_coh},
        report.weights);
    CHECK(report.total == recomputed);
    CHECK(report.s_beat > 0.5);  // strongly periodic percussion
    CHECK(report.s_tempo > 0.8); // constant tempo
    CHECK(report.s_recur > 0.5); // repeated bars
}

TEST_CASE("post-normalization gain changes barely move sub-scores") {
    StructuralPlan plan = make_plan(8);
    const AudioBuffer base = render_plan(plan);
    AudioBuffer scaled = base;
    for (float& s : scaled.samples) s *= 0.5f;

    const ScsReport a = scs(base);
    const ScsReport b = scs(scaled);
    CHECK(std::abs(a.s_beat - b.s_beat) < 0.02);
    CHECK(std::abs(a.s_tempo - b.s_tempo) < 0.02);
    CHECK(std::abs(a.s_bound - b.s_bound) < 0.02);
    CHECK(std::abs(a.s_recur - b.s_recur) < 0.02);
    CHECK(std::abs(a.s_coh - b.s_coh) < 0.02);
}

} // TEST_SUITE
