// JSON rendering and parsing of verdicts, and a short text rendering.

#pragma once

#include <string>

#include <json.hpp>

#include "fo2dec/saturation.hpp"

namespace fo2dec {

nlohmann::json verdict_to_json(Verdict const& v, bool with_timings = false);
// Throws std::runtime_error on malformed input.
Verdict verdict_from_json(nlohmann::json const& j);

nlohmann::json identity_to_json(IdentityReport const& r);
IdentityReport identity_from_json(nlohmann::json const& j);

std::string verdict_text(Verdict const& v);

}  // namespace fo2dec
