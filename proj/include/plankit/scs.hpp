#pragma once

#include <array>
#include <string>
#include <vector>

#include "plankit/analysis.hpp"
#include "plankit/audio.hpp"

namespace plankit {

struct ScsWeights {
    double beat = 1.0;
    double tempo = 1.0;
    double bound = 1.0;
    double recur = 1.0;
    double coh = 1.0;

    double sum() const { return beat + tempo + bound + recur + coh; }

    bool operator==(const ScsWeights&) const = default;
};

struct ScsReport {
    double s_beat = 0.0;
    double s_tempo = 0.0;
    double s_bound = 0.0;
    double s_recur = 0.0;
    double s_coh = 0.0;
    ScsWeights weights;
    double total = 0.0; // 100 * weighted mean of the five sub-scores
    // Sub-scores that degenerated to 0 (e.g. no onset peaks) are named here
    // instead of failing the whole run.
    std::vector<std::string> flags;
};

// Weighted-mean aggregation, exposed separately so it can be checked on
// synthetic sub-score tuples.
double scs_total(const std::array<double, 5>& sub_scores, const ScsWeights& weights);

// Structure score from audio alone. Needs at least kScsMinSeconds of audio.
inline constexpr double kScsMinSeconds = 8.0;
ScsReport scs(const AudioBuffer& audio, const ScsWeights& weights = {});

// Individual sub-scores over shared features; each returns its value and
// appends a flag on degenerate input.
struct ScsFeatures {
    MelSpectrogram mel;
    std::vector<float> envelope;
    SimilarityMatrix ssm;
    std::vector<float> novelty;
    double frames_per_second = 0.0;
};

ScsFeatures scs_features(const AudioBuffer& audio);

double scs_beat(const ScsFeatures& f, std::vector<std::string>& flags);
double scs_tempo(const ScsFeatures& f, std::vector<std::string>& flags);
double scs_bound(const ScsFeatures& f, std::vector<std::string>& flags);
double scs_recur(const ScsFeatures& f, std::vector<std::string>& flags);
double scs_coh(const ScsFeatures& f, std::vector<std::string>& flags);

} // namespace plankit
