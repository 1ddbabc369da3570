#include "eval/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/random.hpp"
#include "eval/metrics.hpp"
#include "regress/search.hpp"

namespace faasprof {

PriorSet TrainingConfig::priors_for(Algorithm a) const {
  auto it = priors.find(a);
  return it == priors.end() ? default_priors(a) : it->second;
}

std::string LeaderboardEntry::label() const {
  return fmt::format("{}{}", to_string(algorithm), sfs ? "+sfs" : "");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset filter_rows(const Dataset& d, const FeatureRecipe& recipe) {
  Dataset out = d;
  for (const auto& t : recipe.transforms) {
    if (t.kind != TransformKind::select_rows) continue;
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < out.rows(); ++r)
      if (t.predicate.test(out, r)) keep.push_back(r);
    out = out.select(keep);
  }
  if (out.rows() == 0) throw DataError("row selection left no data");
  return out;
}

struct Prepared {
  FittedRecipe recipe;
  Dataset train;
  Dataset test;
  Matrix x;
  std::vector<double> y;
  std::vector<Split> folds;
};

LeaderboardEntry run_one(const TrainingConfig& cfg, const Prepared& p, Algorithm algorithm, bool use_sfs,
                         int id) {
  LeaderboardEntry e;
  e.experiment = id;
  e.algorithm = algorithm;
  e.sfs = use_sfs;
  const std::string tag = fmt::format("{}/{}", to_string(algorithm), use_sfs ? "sfs" : "all");
  const std::uint64_t fit_seed = derive_seed(cfg.seed, "fit/" + tag);
  const std::size_t nfeat = p.x.cols();
  if (cfg.max_features > nfeat)
    throw ConfigError(fmt::format("max_features {} exceeds the {} engineered features", cfg.max_features, nfeat));

  std::vector<std::vector<std::size_t>> chosen;  // per trial, in BO order
  auto objective = [&](const Hyperparameters& hp) {
    FitFn f = [&](const Matrix& x, std::span<const double> y) { return fit(x, y, hp, fit_seed); };
    if (!use_sfs) {
      std::vector<std::size_t> all(nfeat);
      for (std::size_t i = 0; i < nfeat; ++i) all[i] = i;
      chosen.push_back(all);
      return cv_mape(f, p.x, p.y, p.folds);
    }
    try {
      auto r = sfs(f, p.x, p.y, cfg.max_features, p.folds);
      chosen.push_back(r.selected);
      return r.score;
    } catch (const Error&) {
      chosen.emplace_back();
      return kInf;
    }
  };
  const BoResult bo = tune_bo(objective, algorithm, cfg.priors_for(algorithm), cfg.budget,
                              derive_seed(cfg.seed, "bo/" + tag));
  e.evaluations = static_cast<int>(bo.trials.size());
  e.trials = bo.trials;
  e.hp = bo.best;
  e.validation_mape = bo.best_score;
  if (!std::isfinite(bo.best_score)) {
    e.error = "every hyperparameter set failed to fit";
    return e;
  }
  std::size_t best_trial = 0;
  for (std::size_t i = 0; i < bo.trials.size(); ++i)
    if (bo.trials[i].hp == bo.best) {
      best_trial = i;
      break;
    }
  auto cols = chosen[best_trial];
  std::sort(cols.begin(), cols.end());
  for (auto c : cols) e.features.push_back(p.train.features[c]);

  RegressionModel m = fit(p.x.select_cols(cols), p.y, e.hp, fit_seed);
  m.features = e.features;
  m.recipe = p.recipe;
  m.validation_mape = e.validation_mape;
  e.test_mape = std::numeric_limits<double>::quiet_NaN();
  if (p.test.rows() > 0) e.test_mape = mape(p.test.targets(), m.predict(p.test));
  e.model = std::move(m);
  return e;
}

}  // namespace

Leaderboard run_experiments(const TrainingConfig& cfg, const Dataset& d) {
  if (cfg.budget < 1) throw ConfigError("budget must be >= 1");
  if (cfg.recipe.features.empty()) throw ConfigError("no feature columns configured");
  for (const auto& f : cfg.recipe.features)
    if (!d.has(f)) throw DataError(fmt::format("feature column '{}' not in dataset", f));

  const Dataset rows = filter_rows(d, cfg.recipe);
  const Split outer = split(rows, cfg.split);
  std::string group = cfg.fold_column;
  if (group == "auto")
    group = cfg.split.kind == SplitKind::interpolation || cfg.split.kind == SplitKind::extrapolation
                ? cfg.split.column
                : "none";
  if (group != "none" && !rows.has(group)) throw DataError(fmt::format("fold column '{}' not in dataset", group));
  if (group == "none" && outer.train.size() < static_cast<std::size_t>(cfg.folds))
    throw DataError(fmt::format("{} training rows cannot fill {} folds", outer.train.size(), cfg.folds));

  Prepared p;
  const Dataset train_raw = rows.select(outer.train);
  p.recipe = fit_recipe(cfg.recipe, train_raw);
  p.train = apply_recipe(p.recipe, train_raw);
  p.test = apply_recipe(p.recipe, rows.select(outer.test));
  p.x = p.train.feature_matrix();
  p.y.assign(p.train.targets().begin(), p.train.targets().end());
  if (group == "none")
    p.folds = kfold(p.train.rows(), cfg.folds, derive_seed(cfg.seed, "inner"));
  else
    p.folds = group_kfold(train_raw.numeric(group), cfg.folds, derive_seed(cfg.seed, "inner"));

  struct Job {
    Algorithm algorithm;
    bool sfs;
  };
  std::vector<Job> jobs;
  for (auto a : cfg.algorithms) {
    jobs.push_back({a, false});
    if (cfg.sfs) jobs.push_back({a, true});
  }

  std::vector<LeaderboardEntry> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_one(cfg, p, jobs[i].algorithm, jobs[i].sfs, static_cast<int>(i));
      } catch (const std::exception& ex) {
        results[i].experiment = static_cast<int>(i);
        results[i].algorithm = jobs[i].algorithm;
        results[i].sfs = jobs[i].sfs;
        results[i].validation_mape = kInf;
        results[i].error = ex.what();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp<int>(cfg.jobs, 1, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (std::all_of(results.begin(), results.end(), [](const auto& e) { return !e.error.empty(); })) {
    std::vector<std::string> issues;
    for (const auto& e : results) issues.push_back(fmt::format("{}: {}", e.label(), e.error));
    throw NumericError(fmt::format("all {} experiments failed:\n  {}", results.size(), fmt::join(issues, "\n  ")));
  }

  std::stable_sort(results.begin(), results.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.error.empty() != b.error.empty()) return a.error.empty();
    return a.validation_mape < b.validation_mape;
  });
  Leaderboard lb;
  lb.entries = std::move(results);
  lb.winner = 0;
  lb.train_rows = p.train.rows();
  lb.test_rows = p.test.rows();
  return lb;
}

std::string Leaderboard::csv() const {
  std::string out = csv::join_row({"rank", "experiment", "algorithm", "sfs", "validation_mape", "test_mape",
                                   "evaluations", "features", "hyperparameters", "error"}) +
                    "\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const bool ok = e.error.empty();
    out += csv::join_row({std::to_string(i + 1), std::to_string(e.experiment), std::string(to_string(e.algorithm)),
                          e.sfs ? "1" : "0", ok ? csv::format_number(e.validation_mape) : "",
                          ok ? csv::format_number(e.test_mape) : "", std::to_string(e.evaluations),
                          fmt::format("{}", fmt::join(e.features, ";")), e.hp.str(), e.error}) +
           "\n";
  }
  return out;
}

std::string Leaderboard::text() const {
  std::string out = fmt::format("{} training rows, {} test rows\n", train_rows, test_rows);
  out += fmt::format("{:>4}  {:<24} {:>10} {:>10}  {}\n", "rank", "model", "val MAPE%", "test MAPE%", "features");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.error.empty()) {
      out += fmt::format("{:>4}  {:<24} failed: {}\n", i + 1, e.label(), e.error);
      continue;
    }
    const std::string test = std::isnan(e.test_mape) ? "-" : fmt::format("{:.3f}", e.test_mape);
    out += fmt::format("{:>4}  {:<24} {:>10.3f} {:>10}  {}\n", i + 1, e.label(), e.validation_mape, test,
                       fmt::join(e.features, ","));
  }
  out += fmt::format("winner: {} ({})\n", best().label(), best().hp.str());
  return out;
}

}  // namespace faasprof
