#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "regress/hyper.hpp"
#include "regress/model.hpp"
#include "regress/search.hpp"

namespace faasprof {

struct TrainingConfig {
  // General
  std::uint64_t seed = 1;
  int folds = 5;    // inner cross-validation
  // Inner folds keep rows sharing this column's value together. "auto" uses
  // the interpolation/extrapolation column, "none" folds plain rows.
  std::string fold_column = "auto";
  int budget = 10;  // hyperparameter sets per experiment
  int jobs = 1;
  std::string input;  // CSV path; may be overridden on the command line
  std::string target = "runtime_s";
  std::string output_dir = "train_out";
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  // DataPreparation
  FeatureRecipe recipe;
  SplitSpec split;
  // FeatureSelection
  bool sfs = true;               // also run the selection variant of every algorithm
  std::size_t max_features = 0;  // 0: no limit
  std::map<Algorithm, PriorSet> priors;  // defaults when absent

  PriorSet priors_for(Algorithm a) const;
};

struct LeaderboardEntry {
  int experiment = 0;  // declaration order: algorithm-major, no-SFS before SFS
  Algorithm algorithm = Algorithm::ridge;
  bool sfs = false;
  Hyperparameters hp;
  std::vector<std::string> features;
  double validation_mape = 0.0;
  double test_mape = 0.0;  // NaN without a test split
  int evaluations = 0;
  std::vector<Trial> trials;  // every hyperparameter set tried, in order
  std::string error;  // non-empty when the experiment failed
  RegressionModel model;

  std::string label() const;
};

struct Leaderboard {
  std::vector<LeaderboardEntry> entries;  // successful ones first, by validation MAPE
  std::size_t winner = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;

  const LeaderboardEntry& best() const { return entries.at(winner); }
  std::string csv() const;
  std::string text() const;
};

// Trains every algorithm with and without SFS on the training portion of d,
// tuning each with Bayesian optimisation scored by inner-CV MAPE, and reports
// test MAPE on the held-out portion. Throws NumericError listing every
// experiment's failure when none succeeds.
Leaderboard run_experiments(const TrainingConfig& cfg, const Dataset& d);

}  // namespace faasprof
