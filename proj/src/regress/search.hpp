#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "common/matrix.hpp"
#include "dataset/dataset.hpp"
#include "regress/hyper.hpp"
#include "regress/model.hpp"

namespace faasprof {

using FitFn = std::function<RegressionModel(const Matrix&, std::span<const double>)>;

// MAPE of out-of-fold predictions pooled over all folds. A fit that throws or
// predicts a non-finite value scores +inf.
double cv_mape(const FitFn& fit_fn, const Matrix& x, std::span<const double> y, const std::vector<Split>& folds);

struct SfsResult {
  std::vector<std::size_t> selected;  // column indices in the order added
  double score = 0.0;                 // CV MAPE of the selected set
};

// Greedy forward selection. max_features = 0 means no limit.
SfsResult sfs(const FitFn& fit_fn, const Matrix& x, std::span<const double> y, std::size_t max_features,
              const std::vector<Split>& folds);

// Same over the dataset's feature columns; returns names.
std::vector<std::string> sfs(const FitFn& fit_fn, const Dataset& d, std::size_t max_features,
                             const std::vector<Split>& folds);

struct Trial {
  Hyperparameters hp;
  double score = 0.0;
};

struct BoResult {
  Hyperparameters best;
  double best_score = 0.0;
  std::vector<Trial> trials;  // in evaluation order
};

using Objective = std::function<double(const Hyperparameters&)>;

inline constexpr int kInitialRandomPoints = 3;

// Sequential model-based minimisation: a few random draws, then points
// maximising expected improvement under a Gaussian-process surrogate on the
// unit cube (log scale for loguniform priors). Exactly `budget` evaluations
// unless every prior is constant, in which case the single point is evaluated
// once. An objective that throws scores +inf.
BoResult tune_bo(const Objective& objective, Algorithm algorithm, const PriorSet& priors, int budget,
                 std::uint64_t seed);

// i.i.d. draws from the priors; the baseline BO is measured against.
Hyperparameters sample_prior(Algorithm algorithm, const PriorSet& priors, std::uint64_t seed);

}  // namespace faasprof
