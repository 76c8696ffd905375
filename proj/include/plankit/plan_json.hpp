#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "plankit/plan.hpp"

namespace plankit {

// Plan file schema (UTF-8 JSON):
//   {
//     "meter": {"n": 4, "d": 4},
//     "bpm":   [120.0, ...],
//     "bars":  [{"section": "verse", "energy": 3, "groove": "backbeat",
//                "harmony": {"key": "C:maj", "degree": 1, "quality": "major"} | null}, ...]
//   }
// Field names are part of the contract.

nlohmann::json plan_to_json(const StructuralPlan& plan);
StructuralPlan plan_from_json(const nlohmann::json& j);

StructuralPlan load_plan(const std::string& path);
void save_plan(const StructuralPlan& plan, const std::string& path);

} // namespace plankit
