#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "plankit/edit.hpp"

namespace plankit {

// Edit file schema: {"ops": [...], "constraints": [...]}.
// Ops carry their kind plus kind-specific payload fields; spans are
// {"start": a, "end": b} objects. At least one op and one constraint.

nlohmann::json edit_spec_to_json(const EditSpec& spec);
EditSpec edit_spec_from_json(const nlohmann::json& j);

EditSpec load_edit_spec(const std::string& path);
void save_edit_spec(const EditSpec& spec, const std::string& path);

// "start:end" form used by CLI flags.
BarSpan parse_bar_span(const std::string& text);

} // namespace plankit
