#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "common/matrix.hpp"
#include "dataset/dataset.hpp"
#include "regress/hyper.hpp"

namespace faasprof {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t leaves() const;
  std::size_t depth() const;
};

struct LinearParams {
  std::vector<double> coef;
  double intercept = 0.0;
};

struct EnsembleParams {
  bool average = false;  // forest: mean of trees; boosting: base + sum
  double base = 0.0;
  std::vector<Tree> trees;
};

class RegressionModel {
public:
  Algorithm algorithm = Algorithm::ridge;
  Hyperparameters hp;
  std::vector<std::string> features;  // columns of the engineered dataset, in matrix order
  FittedRecipe recipe;                // applied to raw inputs before prediction; may be unfitted
  std::variant<LinearParams, EnsembleParams> params;
  double validation_mape = std::numeric_limits<double>::quiet_NaN();

  // x aligned with `features`.
  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;
  // Looks the selected features up by name in an already engineered dataset.
  std::vector<double> predict(const Dataset& engineered) const;
  // Applies the stored recipe to raw data first.
  std::vector<double> predict_raw(const Dataset& raw) const;
};

struct FitDiagnostics {
  std::vector<double> training_mse;  // boosting: after each round actually run
  int rounds = 0;
};

// X rows are observations. Throws NumericError for a singular ridge system and
// DataError for malformed inputs.
RegressionModel fit(const Matrix& x, std::span<const double> y, const Hyperparameters& hp, std::uint64_t seed,
                    FitDiagnostics* diag = nullptr);

// Parameters of a single CART tree, in samples.
struct TreeLimits {
  int max_depth = -1;  // < 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  double min_gain = 0.0;    // split only if the squared-error reduction exceeds this
  double leaf_scale = 1.0;  // leaf value = leaf_scale * mean
};

// Grows a tree on the rows `sample` (duplicates allowed) of x.
Tree grow_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
               const TreeLimits& limits);

}  // namespace faasprof
