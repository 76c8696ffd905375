#include "plankit/plan_json.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "plankit/error.hpp"

namespace plankit {

using nlohmann::json;

namespace {

json harmony_to_json(const std::optional<HarmonyCode>& h) {
    if (!h) return nullptr;
    return json{
        {"key", to_string(h->key)},
        {"degree", h->degree},
        {"quality", to_string(h->quality)},
    };
}

std::optional<HarmonyCode> harmony_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_object()) throw IoError("harmony must be an object or null");
    HarmonyCode h;
    const auto key = key_from_string(j.at("key").get<std::string>());
    if (!key) throw IoError("unknown key name: " + j.at("key").get<std::string>());
    h.key = *key;
    h.degree = j.at("degree").get<int>();
    const auto quality = quality_from_string(j.at("quality").get<std::string>());
    if (!quality) throw IoError("unknown chord quality: " + j.at("quality").get<std::string>());
    h.quality = *quality;
    return h;
}

} // namespace

json plan_to_json(const StructuralPlan& plan) {
    json bars = json::array();
    for (const BarAttributes& a : plan.bars) {
        bars.push_back(json{
            {"section", to_string(a.section)},
            {"energy", a.energy},
            {"groove", to_string(a.groove)},
            {"harmony", harmony_to_json(a.harmony)},
        });
    }
    return json{
        {"meter", {{"n", plan.grid.meter.numerator}, {"d", plan.grid.meter.denominator}}},
        {"bpm", plan.grid.bpm},
        {"bars", bars},
    };
}

StructuralPlan plan_from_json(const json& j) {
    try {
        StructuralPlan plan;
        const json& meter = j.at("meter");
        plan.grid.meter.numerator = meter.at("n").get<int>();
        plan.grid.meter.denominator = meter.at("d").get<int>();
        plan.grid.bpm = j.at("bpm").get<std::vector<double>>();
        for (const json& bar : j.at("bars")) {
            BarAttributes a;
            const std::string section = bar.at("section").get<std::string>();
            const auto s = section_from_string(section);
            if (!s) throw IoError("unknown section name: " + section);
            a.section = *s;
            a.energy = bar.at("energy").get<int>();
            const std::string groove = bar.at("groove").get<std::string>();
            const auto g = groove_from_string(groove);
            if (!g) throw IoError("unknown groove name: " + groove);
            a.groove = *g;
            a.harmony = harmony_from_json(bar.at("harmony"));
            plan.bars.push_back(a);
        }
        return plan;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed plan JSON: ") + e.what());
    }
}

StructuralPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plan file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    return plan_from_json(j);
}

void save_plan(const StructuralPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    out << plan_to_json(plan).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace plankit
