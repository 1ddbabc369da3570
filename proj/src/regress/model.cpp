#include "regress/model.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/random.hpp"
#include "regress/linalg.hpp"

namespace faasprof {

double RegressionModel::predict_row(std::span<const double> x) const {
  if (x.size() != features.size())
    throw DataError(fmt::format("model expects {} features, got {}", features.size(), x.size()));
  if (const auto* lin = std::get_if<LinearParams>(&params)) {
    double s = lin->intercept;
    for (std::size_t i = 0; i < x.size(); ++i) s += lin->coef[i] * x[i];
    return s;
  }
  const auto& e = std::get<EnsembleParams>(params);
  double s = 0.0;
  for (const auto& t : e.trees) s += t.predict(x);
  if (e.average) return e.trees.empty() ? e.base : s / static_cast<double>(e.trees.size());
  return e.base + s;
}

std::vector<double> RegressionModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
  return out;
}

std::vector<double> RegressionModel::predict(const Dataset& engineered) const {
  for (const auto& f : features)
    if (!engineered.has(f)) throw DataError(fmt::format("missing feature column '{}'", f));
  return predict(engineered.matrix(features));
}

std::vector<double> RegressionModel::predict_raw(const Dataset& raw) const {
  if (!recipe.fitted) return predict(raw);
  for (const auto& f : recipe.recipe.features)
    if (!raw.has(f)) throw DataError(fmt::format("missing feature column '{}'", f));
  return predict(apply_recipe(recipe, raw, false));
}

namespace {

// A fraction of the training set when below (or, for splits, at) one.
std::size_t sample_count(double v, std::size_t n, bool split) {
  if (!(v > 0.0)) throw ConfigError(fmt::format("sample limit {} must be positive", v));
  if (v < 1.0 || (split && v == 1.0))
    return std::max<std::size_t>(split ? 2 : 1, static_cast<std::size_t>(std::ceil(v * static_cast<double>(n))));
  return std::max<std::size_t>(split ? 2 : 1, static_cast<std::size_t>(v));
}

void check_label(const Hyperparameters& hp, const std::string& name, const std::string& expected) {
  auto it = hp.labels.find(name);
  if (it != hp.labels.end() && it->second != expected)
    throw ConfigError(fmt::format("{}: unsupported {} '{}' (only '{}')", to_string(hp.algorithm), name, it->second,
                                  expected));
}

LinearParams fit_ridge(const Matrix& x, std::span<const double> y, const Hyperparameters& hp) {
  const double alpha = hp.get("alpha");
  if (alpha < 0.0) throw ConfigError("ridge alpha must be non-negative");
  const bool intercept = hp.get_or("fit_intercept", 1.0) != 0.0;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();

  std::vector<double> xm(d, 0.0);
  double ym = 0.0;
  if (intercept) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) xm[c] += x(r, c);
      ym += y[r];
    }
    for (auto& v : xm) v /= static_cast<double>(n);
    ym /= static_cast<double>(n);
  }

  Matrix a(d, d);
  std::vector<double> b(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double yr = y[r] - ym;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x(r, i) - xm[i];
      b[i] += xi * yr;
      for (std::size_t j = i; j < d; ++j) a(i, j) += xi * (x(r, j) - xm[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    a(i, i) += alpha;
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  }

  LinearParams p;
  try {
    p.coef = linalg::solve(std::move(a), std::move(b));
  } catch (const NumericError&) {
    throw NumericError(fmt::format("ridge: singular system with alpha={:g} (collinear or constant features); "
                                   "use alpha > 0",
                                   alpha));
  }
  p.intercept = ym;
  for (std::size_t i = 0; i < d; ++i) p.intercept -= p.coef[i] * xm[i];
  return p;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

EnsembleParams fit_tree(const Matrix& x, std::span<const double> y, const Hyperparameters& hp) {
  TreeLimits lim;
  lim.max_depth = static_cast<int>(hp.get_or("max_depth", -1));
  lim.min_samples_split = sample_count(hp.get_or("min_samples_split", 2), x.rows(), true);
  lim.min_samples_leaf = sample_count(hp.get_or("min_samples_leaf", 1), x.rows(), false);
  EnsembleParams e;
  e.average = true;
  const auto idx = all_rows(x.rows());
  e.trees.push_back(grow_tree(x, y, idx, lim));
  return e;
}

EnsembleParams fit_forest(const Matrix& x, std::span<const double> y, const Hyperparameters& hp, std::uint64_t seed) {
  const auto n_trees = static_cast<int>(hp.get_or("n_estimators", 5));
  if (n_trees < 1) throw ConfigError("random_forest n_estimators must be >= 1");
  TreeLimits lim;
  lim.max_depth = static_cast<int>(hp.get_or("max_depth", -1));
  lim.min_samples_split = sample_count(hp.get_or("min_samples_split", 2), x.rows(), true);
  lim.min_samples_leaf = sample_count(hp.get_or("min_samples_leaf", 1), x.rows(), false);
  EnsembleParams e;
  e.average = true;
  const std::size_t n = x.rows();
  std::vector<std::size_t> sample(n);
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, fmt::format("tree{}", t)));
    for (auto& s : sample) s = rng.index(n);
    e.trees.push_back(grow_tree(x, y, sample, lim));
  }
  return e;
}

EnsembleParams fit_boosting(const Matrix& x, std::span<const double> y, const Hyperparameters& hp,
                            FitDiagnostics* diag) {
  const auto rounds = static_cast<int>(hp.get_or("n_estimators", 1000));
  const double lr = hp.get_or("learning_rate", 0.1);
  const double gamma = hp.get_or("gamma", 0.0);
  const bool early_stop = hp.get_or("early_stop", 1.0) != 0.0;
  if (rounds < 1) throw ConfigError("gradient_boosting n_estimators must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("gradient_boosting learning_rate must be positive");
  if (gamma < 0.0) throw ConfigError("gradient_boosting gamma must be non-negative");

  TreeLimits lim;
  lim.max_depth = static_cast<int>(hp.get_or("max_depth", 100));
  lim.min_samples_leaf = std::max<std::size_t>(1, static_cast<std::size_t>(hp.get_or("min_child_weight", 1)));
  lim.min_samples_split = 2 * lim.min_samples_leaf;
  // gamma bounds the drop in half the squared error, as for an XGBoost-style gain
  lim.min_gain = 2.0 * gamma;
  lim.leaf_scale = lr;

  const std::size_t n = x.rows();
  EnsembleParams e;
  e.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> pred(n, e.base), resid(n);
  const auto idx = all_rows(n);
  for (int t = 0; t < rounds; ++t) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - pred[i];
    Tree tree = grow_tree(x, resid, idx, lim);
    double mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] += tree.predict(x.row(i));
      mse += (y[i] - pred[i]) * (y[i] - pred[i]);
    }
    const bool stump = tree.nodes.size() == 1;
    const double leaf = tree.nodes[0].value;
    e.trees.push_back(std::move(tree));
    if (diag) {
      diag->training_mse.push_back(mse / static_cast<double>(n));
      diag->rounds = t + 1;
    }
    // A single-leaf round leaves split gains unchanged (they ignore a constant
    // shift), so every later round is a single leaf too; their geometric sum
    // is added in one step.
    if (stump && early_stop && t + 1 < rounds) {
      const double q = 1.0 - lr;
      const double remaining = leaf / lr * q * (1.0 - std::pow(q, rounds - t - 1));
      Tree tail;
      tail.nodes.emplace_back();
      tail.nodes[0].value = remaining;
      e.trees.push_back(std::move(tail));
      break;
    }
  }
  return e;
}

}  // namespace

RegressionModel fit(const Matrix& x, std::span<const double> y, const Hyperparameters& hp, std::uint64_t seed,
                    FitDiagnostics* diag) {
  if (x.rows() != y.size()) throw DataError(fmt::format("{} rows but {} targets", x.rows(), y.size()));
  if (x.rows() < 2) throw DataError(fmt::format("need at least 2 rows to fit, have {}", x.rows()));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (!std::isfinite(y[r])) throw DataError(fmt::format("non-finite target at row {}", r + 1));
    for (double v : x.row(r))
      if (!std::isfinite(v)) throw DataError(fmt::format("non-finite feature value at row {}", r + 1));
  }
  check_label(hp, "criterion", "mse");
  check_label(hp, "max_features", "auto");

  RegressionModel m;
  m.algorithm = hp.algorithm;
  m.hp = hp;
  switch (hp.algorithm) {
    case Algorithm::ridge: m.params = fit_ridge(x, y, hp); break;
    case Algorithm::decision_tree: m.params = fit_tree(x, y, hp); break;
    case Algorithm::random_forest: m.params = fit_forest(x, y, hp, seed); break;
    case Algorithm::gradient_boosting: m.params = fit_boosting(x, y, hp, diag); break;
  }
  m.features.resize(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) m.features[c] = fmt::format("x{}", c);
  return m;
}

}  // namespace faasprof
