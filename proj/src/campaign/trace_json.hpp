#pragma once

#include <json.hpp>

#include "campaign/campaign.hpp"

namespace faasprof {

nlohmann::json configuration_to_json(const RunConfiguration& c);
RunConfiguration configuration_from_json(const nlohmann::json& j);

// Lossless: doubles are written in shortest round-trip form.
nlohmann::json trace_to_json(const RunTrace& t);
RunTrace trace_from_json(const nlohmann::json& j);

// Canonical description of a campaign, used for its digest and `describe`.
nlohmann::json spec_to_json(const CampaignSpec& spec);

}  // namespace faasprof
