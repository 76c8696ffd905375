#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plankit {

// Tempo ceiling in beats/minute. Shared by plan validation and by the
// normalized-tempo control channel.
inline constexpr double kBetaMax = 300.0;

enum class Section : std::uint8_t {
    Intro,
    Verse,
    Prechorus,
    Chorus,
    Bridge,
    Breakdown,
    Outro,
    Fill,
};
inline constexpr int kSectionCount = 8;

// Energy level 0 is reserved for muted bars; authored plans use 1..5.
inline constexpr int kEnergyMin = 0;
inline constexpr int kEnergyMax = 5;
inline constexpr int kEnergyLevels = kEnergyMax - kEnergyMin + 1;

enum class Groove : std::uint8_t {
    FourFloor,
    Backbeat,
    HalfTime,
    DoubleTime,
    Shuffle,
    Offbeat,
    Breakbeat,
    Sparse,
};
inline constexpr int kGrooveCount = 8;

enum class Mode : std::uint8_t { Major, Minor };

enum class ChordQuality : std::uint8_t { Major, Minor, Diminished, Dominant7 };
inline constexpr int kDegreeCount = 7;
inline constexpr int kQualityCount = 4;

// Key = tonic pitch class (0 = C .. 11 = B) plus mode.
struct Key {
    int tonic = 0;
    Mode mode = Mode::Major;

    bool operator==(const Key&) const = default;
};

// Transposition-aware chord code: key + scale degree + quality.
struct HarmonyCode {
    Key key;
    int degree = 1; // 1..7
    ChordQuality quality = ChordQuality::Major;

    bool operator==(const HarmonyCode&) const = default;
};

struct Meter {
    int numerator = 4;   // beats per bar, >= 1
    int denominator = 4; // note value of one beat, in {1,2,4,8,16}

    bool operator==(const Meter&) const = default;
};

// Meter plus one tempo value per bar. Tempo counts beats of the meter's
// note value, so a bar lasts numerator * 60 / bpm seconds regardless of
// the denominator.
struct BeatGrid {
    Meter meter;
    std::vector<double> bpm;

    int bar_count() const { return static_cast<int>(bpm.size()); }

    bool operator==(const BeatGrid&) const = default;
};

struct BarAttributes {
    Section section = Section::Intro;
    int energy = 3;
    Groove groove = Groove::Backbeat;
    std::optional<HarmonyCode> harmony;

    bool operator==(const BarAttributes&) const = default;
};

struct StructuralPlan {
    BeatGrid grid;
    std::vector<BarAttributes> bars; // length must equal grid.bar_count()

    int bar_count() const { return static_cast<int>(bars.size()); }

    bool operator==(const StructuralPlan&) const = default;
};

// One broken invariant: where it is, which rule, and a human-readable message.
struct Violation {
    std::string path;
    std::string kind;
    std::string message;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ValidationResult validate_plan(const StructuralPlan& plan, double beta_max = kBetaMax);

// Throws DomainError with the first violation if the plan is invalid.
void require_valid(const StructuralPlan& plan, double beta_max = kBetaMax);

// Bar timing. Bars are 1-indexed throughout the public interface.
double bar_duration(const BeatGrid& grid, int bar);
std::vector<double> downbeat_times(const BeatGrid& grid);
double total_duration(const BeatGrid& grid);
double total_duration(const StructuralPlan& plan);

// Maximal run of consecutive bars sharing a section value. 1-indexed inclusive.
struct SectionSpan {
    Section section;
    int first_bar = 0;
    int last_bar = 0;

    bool operator==(const SectionSpan&) const = default;
};

std::vector<SectionSpan> section_spans(const StructuralPlan& plan);

// Enum <-> string maps used by the JSON formats and the CLI.
const char* to_string(Section s);
const char* to_string(Groove g);
const char* to_string(ChordQuality q);
std::string to_string(const Key& k);
std::optional<Section> section_from_string(const std::string& name);
std::optional<Groove> groove_from_string(const std::string& name);
std::optional<ChordQuality> quality_from_string(const std::string& name);
std::optional<Key> key_from_string(const std::string& name);

} // namespace plankit
