#include "plankit/edit_json.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "plankit/error.hpp"
#include "plankit/plan_json.hpp"

namespace plankit {

using nlohmann::json;

namespace {

json span_to_json(const BarSpan& s) {
    return json{{"start", s.start}, {"end", s.end}};
}

BarSpan span_from_json(const json& j) {
    return BarSpan{j.at("start").get<int>(), j.at("end").get<int>()};
}

json harmony_payload(const std::optional<HarmonyCode>& h) {
    if (!h) return nullptr;
    return json{{"key", to_string(h->key)},
                {"degree", h->degree},
                {"quality", to_string(h->quality)}};
}

std::optional<HarmonyCode> harmony_payload_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    HarmonyCode h;
    const auto key = key_from_string(j.at("key").get<std::string>());
    const auto quality = quality_from_string(j.at("quality").get<std::string>());
    if (!key || !quality) throw IoError("bad harmony payload");
    h.key = *key;
    h.degree = j.at("degree").get<int>();
    h.quality = *quality;
    return h;
}

json op_to_json(const EditOp& op) {
    json j{{"kind", to_string(op.kind)}};
    switch (op.kind) {
        case EditOp::Kind::SetEnergy:
            j["span"] = span_to_json(op.span);
            j["energy"] = op.energy;
            break;
        case EditOp::Kind::SwapGroove:
            j["span"] = span_to_json(op.span);
            j["groove"] = to_string(op.groove);
            break;
        case EditOp::Kind::SetHarmony:
            j["span"] = span_to_json(op.span);
            j["harmony"] = harmony_payload(op.harmony);
            break;
        case EditOp::Kind::Retempo:
            j["span"] = span_to_json(op.span);
            j["bpm"] = op.bpm;
            break;
        case EditOp::Kind::ExtendSection:
            j["section_span"] = op.section_span;
            j["bars"] = op.bar_count;
            break;
        case EditOp::Kind::Mute:
            j["span"] = span_to_json(op.span);
            break;
    }
    return j;
}

EditOp op_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    EditOp op;
    if (kind == "set_energy") {
        op.kind = EditOp::Kind::SetEnergy;
        op.span = span_from_json(j.at("span"));
        op.energy = j.at("energy").get<int>();
    } else if (kind == "swap_groove") {
        op.kind = EditOp::Kind::SwapGroove;
        op.span = span_from_json(j.at("span"));
        const auto g = groove_from_string(j.at("groove").get<std::string>());
        if (!g) throw IoError("unknown groove name: " + j.at("groove").get<std::string>());
        op.groove = *g;
    } else if (kind == "set_harmony") {
        op.kind = EditOp::Kind::SetHarmony;
        op.span = span_from_json(j.at("span"));
        op.harmony = harmony_payload_from_json(j.at("harmony"));
    } else if (kind == "retempo") {
        op.kind = EditOp::Kind::Retempo;
        op.span = span_from_json(j.at("span"));
        op.bpm = j.at("bpm").get<double>();
    } else if (kind == "extend_section") {
        op.kind = EditOp::Kind::ExtendSection;
        op.section_span = j.at("section_span").get<int>();
        op.bar_count = j.at("bars").get<int>();
    } else if (kind == "mute") {
        op.kind = EditOp::Kind::Mute;
        op.span = span_from_json(j.at("span"));
    } else {
        throw IoError("unknown edit op kind: " + kind);
    }
    return op;
}

json predicate_to_json(const Predicate& p) {
    json j{{"kind", to_string(p.kind)}};
    switch (p.kind) {
        case Predicate::Kind::EnergyUp:
        case Predicate::Kind::EnergyDown:
            j["delta_db"] = p.delta_db;
            break;
        case Predicate::Kind::Silence:
            j["threshold_db"] = p.threshold_db;
            break;
        case Predicate::Kind::TempoSet:
            j["bpm"] = p.target_bpm;
            j["tolerance"] = p.bpm_tolerance;
            break;
        case Predicate::Kind::GrooveMatch:
            j["groove"] = to_string(p.groove);
            j["min_correlation"] = p.min_correlation;
            break;
        case Predicate::Kind::HarmonyMatch:
            j["chord"] = json{{"key", to_string(p.chord.key)},
                              {"degree", p.chord.degree},
                              {"quality", to_string(p.chord.quality)}};
            j["min_correlation"] = p.min_correlation;
            break;
    }
    return j;
}

Predicate predicate_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    Predicate p;
    if (kind == "energy_up" || kind == "energy_down") {
        p.kind = (kind == "energy_up") ? Predicate::Kind::EnergyUp
                                       : Predicate::Kind::EnergyDown;
        p.delta_db = j.at("delta_db").get<double>();
    } else if (kind == "silence") {
        p.kind = Predicate::Kind::Silence;
        p.threshold_db = j.at("threshold_db").get<double>();
    } else if (kind == "tempo_set") {
        p.kind = Predicate::Kind::TempoSet;
        p.target_bpm = j.at("bpm").get<double>();
        p.bpm_tolerance = j.at("tolerance").get<double>();
    } else if (kind == "groove_match") {
        p.kind = Predicate::Kind::GrooveMatch;
        const auto g = groove_from_string(j.at("groove").get<std::string>());
        if (!g) throw IoError("unknown groove name in predicate");
        p.groove = *g;
        p.min_correlation = j.at("min_correlation").get<double>();
    } else if (kind == "harmony_match") {
        p.kind = Predicate::Kind::HarmonyMatch;
        const json& chord = j.at("chord");
        const auto key = key_from_string(chord.at("key").get<std::string>());
        const auto quality = quality_from_string(chord.at("quality").get<std::string>());
        if (!key || !quality) throw IoError("bad chord in predicate");
        p.chord.key = *key;
        p.chord.degree = chord.at("degree").get<int>();
        p.chord.quality = *quality;
        p.min_correlation = j.at("min_correlation").get<double>();
    } else {
        throw IoError("unknown predicate kind: " + kind);
    }
    return p;
}

} // namespace

json edit_spec_to_json(const EditSpec& spec) {
    json ops = json::array();
    for (const EditOp& op : spec.ops) ops.push_back(op_to_json(op));
    json constraints = json::array();
    for (const Predicate& p : spec.constraints) constraints.push_back(predicate_to_json(p));
    return json{{"ops", ops}, {"constraints", constraints}};
}

EditSpec edit_spec_from_json(const json& j) {
    try {
        EditSpec spec;
        for (const json& op : j.at("ops")) spec.ops.push_back(op_from_json(op));
        for (const json& p : j.at("constraints")) {
            spec.constraints.push_back(predicate_from_json(p));
        }
        if (spec.ops.empty()) throw IoError("edit spec needs at least one op");
        if (spec.constraints.empty()) throw IoError("edit spec needs at least one constraint");
        return spec;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed edit JSON: ") + e.what());
    }
}

EditSpec load_edit_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edit file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    return edit_spec_from_json(j);
}

void save_edit_spec(const EditSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    out << edit_spec_to_json(spec).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

BarSpan parse_bar_span(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw IoError("bar span must look like start:end");
    try {
        const int start = std::stoi(text.substr(0, colon));
        const int end = std::stoi(text.substr(colon + 1));
        return BarSpan{start, end};
    } catch (const std::exception&) {
        throw IoError("bar span must look like start:end, got: " + text);
    }
}

} // namespace plankit
