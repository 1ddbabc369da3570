#pragma once

#include <string>
#include <vector>

#include "campaign/campaign.hpp"
#include "eval/experiment.hpp"

namespace faasprof {

// Both parsers collect every problem (unknown keys, malformed values,
// unresolved references, capacity violations) and throw one ConfigError
// carrying all of them. A missing file is an IoError.
CampaignSpec parse_campaign_config(const std::string& path);
CampaignSpec parse_campaign_yaml(const std::string& text, const std::string& origin = "<string>");

TrainingConfig parse_training_config(const std::string& path);
TrainingConfig parse_training_yaml(const std::string& text, const std::string& origin = "<string>");

// Columns the training config names that the dataset lacks.
std::vector<std::string> column_issues(const TrainingConfig& cfg, const Dataset& d);

}  // namespace faasprof
