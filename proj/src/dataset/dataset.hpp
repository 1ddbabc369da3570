#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/matrix.hpp"

namespace faasprof {

struct Column {
  std::string name;
  bool numeric = true;
  std::vector<double> values;      // numeric columns; NaN marks an empty cell
  std::vector<std::string> text;   // text columns
  std::string source;              // base column an engineered column derives from
  bool binary = false;             // one-hot indicator
};

// Rectangular table with a designated target column and an ordered list of
// feature columns. Rows failing validity checks at load time are counted in
// `rejected` and not stored.
class Dataset {
public:
  std::vector<Column> columns;
  std::string target;
  std::vector<std::string> features;
  std::size_t rejected = 0;
  std::string provenance;

  std::size_t rows() const;
  std::size_t cols() const { return columns.size(); }
  bool has(const std::string& name) const;
  const Column& column(const std::string& name) const;
  Column& column(const std::string& name);
  std::vector<std::string> column_names() const;

  std::span<const double> numeric(const std::string& name) const;
  std::span<const double> targets() const { return numeric(target); }

  Dataset select(std::span<const std::size_t> rows) const;
  Matrix matrix(std::span<const std::string> names) const;
  Matrix feature_matrix() const { return matrix(features); }

  void add_column(Column c);
};

// Column names of the per-job campaign CSV, in file order.
const std::vector<std::string>& job_csv_header();
// Column names of the per-run aggregate CSV, in file order.
const std::vector<std::string>& run_csv_header();

// Loads a CSV. Known campaign columns have fixed types; other columns are
// numeric when their first non-empty cell parses as a number. Rows with the
// wrong field count, a missing target, or a zero target are rejected.
Dataset load_dataset(const std::string& path, const std::string& target = "runtime_s");

// Builds a dataset from in-memory columns (all numeric).
Dataset make_dataset(std::span<const std::string> names, const Matrix& values, std::string target,
                     std::vector<std::string> features);

// --- row selection ---------------------------------------------------------

enum class CompareOp { eq, ne, lt, le, gt, ge };

struct RowPredicate {
  std::string column;
  CompareOp op = CompareOp::eq;
  std::string value;

  // "cores >= 4", "component == blurry-faces"
  static RowPredicate parse(const std::string& text);
  bool test(const Dataset& d, std::size_t row) const;
  std::string str() const;
};

// --- feature engineering ---------------------------------------------------

enum class TransformKind { select_rows, one_hot, inverse, log, polynomial, normalize };

struct Transform {
  TransformKind kind = TransformKind::inverse;
  std::string column;     // one_hot/inverse/log/normalize ("*" = every feature)
  int degree = 2;         // polynomial
  RowPredicate predicate; // select_rows
};

struct FeatureRecipe {
  std::vector<std::string> features;  // base feature columns
  std::vector<Transform> transforms;  // applied in order
};

// Learned state of a recipe: one-hot categories and normalization statistics
// are computed on the data the recipe is first fitted to and reused after.
struct FittedRecipe {
  FeatureRecipe recipe;
  std::vector<std::vector<std::string>> categories;        // per one_hot transform
  std::vector<std::vector<std::pair<std::string, std::pair<double, double>>>> scaling;  // per normalize: (col,(mean,sd))
  std::vector<std::string> output_features;
  bool fitted = false;
};

FittedRecipe fit_recipe(const FeatureRecipe& recipe, const Dataset& d);
// filter_rows=false skips select_rows transforms (prediction inputs).
Dataset apply_recipe(const FittedRecipe& fitted, const Dataset& d, bool filter_rows = true);

// Fits the recipe to d and returns the transformed dataset.
Dataset engineer_features(const Dataset& d, const FeatureRecipe& recipe);

// Inverse of a normalize transform for one column.
double denormalize(const FittedRecipe& fitted, const std::string& column, double value);

// --- splitting ---------------------------------------------------------------

enum class SplitKind { none, holdout, kfold, interpolation, extrapolation };

struct SplitSpec {
  SplitKind kind = SplitKind::none;
  double fraction = 0.2;       // holdout
  int k = 5;                   // kfold
  std::uint64_t seed = 0;      // holdout, kfold
  std::string column;          // interpolation, extrapolation
  std::vector<double> values;  // interpolation: held-out values
  double threshold = 0.0;      // extrapolation: test = column > threshold
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Single train/test partition (none, holdout, interpolation, extrapolation).
Split split(const Dataset& d, const SplitSpec& spec);

// k folds whose test parts partition [0, n); sizes differ by at most one.
std::vector<Split> kfold(std::size_t n, int k, std::uint64_t seed);

// Folds that never split rows sharing a group value: the distinct values are
// shuffled and dealt round-robin into min(k, #values) folds.
std::vector<Split> group_kfold(std::span<const double> groups, int k, std::uint64_t seed);

}  // namespace faasprof
