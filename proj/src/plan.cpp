#include "plankit/plan.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "plankit/error.hpp"

namespace plankit {

namespace {

bool valid_denominator(int d) {
    return d == 1 || d == 2 || d == 4 || d == 8 || d == 16;
}

std::string bar_path(int bar, const char* field) {
    std::ostringstream os;
    os << "bars[" << bar << "]." << field;
    return os.str();
}

} // namespace

ValidationResult validate_plan(const StructuralPlan& plan, double beta_max) {
    ValidationResult result;
    auto add = [&](std::string path, std::string kind, std::string message) {
        result.violations.push_back({std::move(path), std::move(kind), std::move(message)});
    };

    const int bars = plan.grid.bar_count();
    if (bars == 0) {
        add("bpm", "EmptyPlan", "plan has no bars");
        return result;
    }

    if (plan.grid.meter.numerator < 1) {
        add("meter.n", "InvalidMeter", "numerator must be >= 1");
    }
    if (!valid_denominator(plan.grid.meter.denominator)) {
        add("meter.d", "InvalidMeter", "denominator must be one of 1, 2, 4, 8, 16");
    }

    for (int t = 1; t <= bars; ++t) {
        const double bpm = plan.grid.bpm[t - 1];
        if (!std::isfinite(bpm)) {
            add(bar_path(t, "bpm"), "NonPositiveTempo", "tempo must be finite");
        } else if (bpm <= 0.0) {
            std::ostringstream os;
            os << "tempo " << bpm << " at bar " << t << " must be positive";
            add(bar_path(t, "bpm"), "NonPositiveTempo", os.str());
        } else if (bpm > beta_max) {
            std::ostringstream os;
            os << "tempo " << bpm << " at bar " << t << " exceeds " << beta_max;
            add(bar_path(t, "bpm"), "TempoOutOfRange", os.str());
        }
    }

    if (plan.bar_count() != bars) {
        std::ostringstream os;
        os << "plan has " << plan.bar_count() << " attribute rows but " << bars << " tempo entries";
        add("bars", "LengthMismatch", os.str());
    }

    for (int t = 1; t <= plan.bar_count(); ++t) {
        const BarAttributes& a = plan.bars[t - 1];
        if (static_cast<int>(a.section) >= kSectionCount) {
            add(bar_path(t, "section"), "VocabularyOverflow", "section outside vocabulary");
        }
        if (a.energy < kEnergyMin || a.energy > kEnergyMax) {
            std::ostringstream os;
            os << "energy " << a.energy << " outside [" << kEnergyMin << "," << kEnergyMax << "]";
            add(bar_path(t, "energy"), "VocabularyOverflow", os.str());
        }
        if (static_cast<int>(a.groove) >= kGrooveCount) {
            add(bar_path(t, "groove"), "VocabularyOverflow", "groove outside vocabulary");
        }
        if (a.harmony) {
            const HarmonyCode& h = *a.harmony;
            if (h.key.tonic < 0 || h.key.tonic > 11) {
                add(bar_path(t, "harmony.key"), "VocabularyOverflow", "tonic outside 0..11");
            }
            if (h.degree < 1 || h.degree > kDegreeCount) {
                std::ostringstream os;
                os << "degree " << h.degree << " outside [1," << kDegreeCount << "]";
                add(bar_path(t, "harmony.degree"), "VocabularyOverflow", os.str());
            }
            if (static_cast<int>(h.quality) >= kQualityCount) {
                add(bar_path(t, "harmony.quality"), "VocabularyOverflow", "quality outside vocabulary");
            }
        }
    }

    return result;
}

void require_valid(const StructuralPlan& plan, double beta_max) {
    ValidationResult r = validate_plan(plan, beta_max);
    if (!r.ok()) {
        const Violation& v = r.violations.front();
        throw DomainError(v.kind, v.path + ": " + v.message);
    }
}

double bar_duration(const BeatGrid& grid, int bar) {
    if (bar < 1 || bar > grid.bar_count()) {
        std::ostringstream os;
        os << "bar " << bar << " outside [1," << grid.bar_count() << "]";
        throw DomainError("IndexOutOfRange", os.str());
    }
    return grid.meter.numerator * 60.0 / grid.bpm[bar - 1];
}

std::vector<double> downbeat_times(const BeatGrid& grid) {
    std::vector<double> times(grid.bar_count());
    double t = 0.0;
    for (int bar = 1; bar <= grid.bar_count(); ++bar) {
        times[bar - 1] = t;
        t += bar_duration(grid, bar);
    }
    return times;
}

double total_duration(const BeatGrid& grid) {
    double t = 0.0;
    for (int bar = 1; bar <= grid.bar_count(); ++bar) {
        t += bar_duration(grid, bar);
    }
    return t;
}

double total_duration(const StructuralPlan& plan) {
    return total_duration(plan.grid);
}

std::vector<SectionSpan> section_spans(const StructuralPlan& plan) {
    std::vector<SectionSpan> spans;
    for (int t = 1; t <= plan.bar_count(); ++t) {
        const Section s = plan.bars[t - 1].section;
        if (spans.empty() || spans.back().section != s) {
            spans.push_back({s, t, t});
        } else {
            spans.back().last_bar = t;
        }
    }
    return spans;
}

namespace {

constexpr std::array<const char*, kSectionCount> kSectionNames = {
    "intro", "verse", "prechorus", "chorus", "bridge", "breakdown", "outro", "fill",
};

constexpr std::array<const char*, kGrooveCount> kGrooveNames = {
    "four_floor", "backbeat", "half_time", "double_time",
    "shuffle",    "offbeat",  "breakbeat", "sparse",
};

constexpr std::array<const char*, kQualityCount> kQualityNames = {
    "major", "minor", "diminished", "dominant7",
};

constexpr std::array<const char*, 12> kTonicNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
};

} // namespace

const char* to_string(Section s) { return kSectionNames[static_cast<int>(s)]; }
const char* to_string(Groove g) { return kGrooveNames[static_cast<int>(g)]; }
const char* to_string(ChordQuality q) { return kQualityNames[static_cast<int>(q)]; }

std::string to_string(const Key& k) {
    std::string out = kTonicNames[k.tonic];
    out += (k.mode == Mode::Major) ? ":maj" : ":min";
    return out;
}

std::optional<Section> section_from_string(const std::string& name) {
    for (int i = 0; i < kSectionCount; ++i) {
        if (name == kSectionNames[i]) return static_cast<Section>(i);
    }
    return std::nullopt;
}

std::optional<Groove> groove_from_string(const std::string& name) {
    for (int i = 0; i < kGrooveCount; ++i) {
        if (name == kGrooveNames[i]) return static_cast<Groove>(i);
    }
    return std::nullopt;
}

std::optional<ChordQuality> quality_from_string(const std::string& name) {
    for (int i = 0; i < kQualityCount; ++i) {
        if (name == kQualityNames[i]) return static_cast<ChordQuality>(i);
    }
    return std::nullopt;
}

std::optional<Key> key_from_string(const std::string& name) {
    const auto colon = name.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const std::string tonic = name.substr(0, colon);
    const std::string mode = name.substr(colon + 1);
    Key key;
    bool found = false;
    for (int i = 0; i < 12; ++i) {
        if (tonic == kTonicNames[i]) {
            key.tonic = i;
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;
    if (mode == "maj") {
        key.mode = Mode::Major;
    } else if (mode == "min") {
        key.mode = Mode::Minor;
    } else {
        return std::nullopt;
    }
    return key;
}

} // namespace plankit
