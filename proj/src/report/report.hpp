#pragma once

#include <string>

#include "eval/experiment.hpp"

namespace faasprof {

struct TrainingOutputs {
  std::string leaderboard_csv;
  std::string leaderboard_txt;
  std::string model;  // winner
};

// Writes leaderboard.csv, leaderboard.txt and the winner as model.fpm.
TrainingOutputs write_training_outputs(const Leaderboard& board, const std::string& dir);

// Human-readable summary of a campaign or training output directory. For a
// campaign with runs.csv, also writes summary.csv: one row per distinct
// (configuration, scope, component, resource, cores, batch_size, lambda) with mean and
// standard deviation of runtime_s and mean throughput over repetitions.
std::string render_report(const std::string& dir);

}  // namespace faasprof
