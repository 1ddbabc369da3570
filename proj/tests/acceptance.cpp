// Acceptance gate: one PASS/FAIL line per criterion. Usage:
//   faasprof_acceptance [work_dir] [C7 C9 ...]
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "campaign/campaign.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/random.hpp"
#include "config/config.hpp"
#include "dataset/dataset.hpp"
#include "eval/experiment.hpp"
#include "eval/metrics.hpp"
#include "predict/predictor.hpp"
#include "regress/model.hpp"
#include "report/report.hpp"
#include "sim/simulator.hpp"

using namespace faasprof;
namespace fs = std::filesystem;

namespace {

// Tolerances and gates.
constexpr double kThroughputTolerance = 0.05;
constexpr double kRidgeRelativeError = 1e-8;
constexpr double kMseRoundoff = 1e-12;  // relative slack for float summation order
constexpr double kInterpolationWinnerMape = 5.0;
constexpr double kAnyModelMape = 30.0;
constexpr double kExtrapolationMape = 10.0;
constexpr int kBudget = 10;
constexpr std::uint64_t kSeed = 2024;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

fs::path g_work;

fs::path fresh(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Transform transform(TransformKind kind, const std::string& column = "") {
  Transform t;
  t.kind = kind;
  t.column = column;
  return t;
}

Transform select(const std::string& predicate) {
  Transform t;
  t.kind = TransformKind::select_rows;
  t.predicate = RowPredicate::parse(predicate);
  return t;
}

Resource resource(const std::string& name, int cores, std::vector<int> nodes) {
  Resource r;
  r.name = name;
  r.cores_per_node = cores;
  r.node_counts = std::move(nodes);
  r.warm_fraction = 1.0;
  return r;
}

Component component(const std::string& name, const std::string& res) {
  Component c;
  c.name = name;
  c.compatible_resources = {res};
  return c;
}

WorkloadSpec batch(int n) {
  WorkloadSpec w;
  w.mode = WorkloadMode::async_batch;
  w.batch_size = n;
  return w;
}

WorkloadSpec constant_rate(double rate, double duration, double ramp_up) {
  WorkloadSpec w;
  w.mode = WorkloadMode::sync;
  w.arrival = ArrivalKind::constant;
  w.rate = rate;
  w.duration = duration;
  w.ramp_up = ramp_up;
  return w;
}

ServiceLaw law(double base, double per_core = 0.0, double per_file = 0.0, double sigma = 0.0) {
  ServiceLaw l;
  l.base = base;
  l.per_core = per_core;
  l.per_file = per_file;
  if (sigma > 0.0) l.noise = {NoiseKind::normal, sigma};
  return l;
}

void run_campaign(const CampaignSpec& spec, const fs::path& dir) {
  SimulatorBackend backend(spec);
  ExecuteOptions o;
  o.output_dir = dir.string();
  o.jobs = 4;
  const auto r = execute_campaign(plan_campaign(spec), backend, o);
  if (!r.complete || !r.failures.empty())
    throw StateError(fmt::format("campaign '{}' did not complete cleanly", spec.name));
}

Leaderboard train(const TrainingConfig& cfg, const fs::path& csv, const fs::path& out) {
  const auto d = load_dataset(csv.string(), cfg.target);
  auto board = run_experiments(cfg, d);
  write_training_outputs(board, out.string());
  return board;
}

// Single stage, deterministic chain used by the simulator oracles.
struct Chain {
  WorkflowSpec workflow;
  std::vector<Resource> resources;
  LawMap laws;
  RunConfiguration config;
};

Chain chain(const std::vector<int>& parallelism, const std::vector<double>& compute, const WorkloadSpec& w) {
  Chain c;
  c.workflow.name = "chain";
  for (std::size_t k = 0; k < parallelism.size(); ++k) {
    const std::string name = fmt::format("s{}", k);
    c.resources.push_back(resource("res-" + name, 1, {64}));
    c.workflow.components.push_back(component(name, "res-" + name));
    c.config.deployment.units.push_back(TestingUnit{name, false, {{name, "res-" + name}}});
    c.config.parallelism[name] = parallelism[k];
    c.laws[name] = law(compute[k]);
  }
  c.config.workload = w;
  return c;
}

RunTrace simulate(const Chain& c, std::uint64_t seed = 1, const SimulationOptions& o = {}) {
  return simulate_run(c.workflow, c.resources, c.config, c.laws, seed, o);
}

// Independent event-list oracle: FIFO jobs, each of p servers takes the next
// job as soon as it is free.
double brute_force_makespan(int n, const std::vector<int>& p, const std::vector<double>& c) {
  std::vector<double> ready(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::sort(ready.begin(), ready.end());
    std::vector<double> free_at(static_cast<std::size_t>(p[k]), 0.0);
    for (double& t : ready) {
      auto it = std::min_element(free_at.begin(), free_at.end());
      t = std::max(t, *it) + c[k];
      *it = t;
    }
  }
  return *std::max_element(ready.begin(), ready.end());
}

// ---------------------------------------------------------------------------

Outcome c1_enumeration() {
  const auto spec = parse_campaign_config(std::string(FAASPROF_SOURCE_DIR) + "/configs/recipe_transcriber.yaml");
  const auto e = enumerate(spec);
  const bool ok = e.configurations.size() == 96 && e.selection.train.size() == 32;
  return {ok, fmt::format("{} configurations, {} in the extremes training set", e.configurations.size(),
                          e.selection.train.size())};
}

Outcome c2_wave() {
  const double wave = makespan(simulate(chain({4}, {5.0}, batch(10))));
  int cases = 0, mismatches = 0;
  for (int n = 1; n <= 12; ++n)
    for (int p = 1; p <= 6; ++p)
      for (double c : {1.0, 2.0, 5.0}) {
        ++cases;
        if (makespan(simulate(chain({p}, {c}, batch(n)))) != brute_force_makespan(n, {p}, {c})) ++mismatches;
      }
  return {wave == 15.0 && mismatches == 0,
          fmt::format("N=10 p=4 c=5 makespan {} s; {}/{} brute-force cases differ", wave, mismatches, cases)};
}

Outcome c3_no_queueing() {
  struct Case {
    double rate, c;
    int p;
  };
  // rates with exact binary reciprocals so arrival times are exact
  const Case cases[] = {{0.25, 2.0, 1}, {0.5, 2.0, 2}, {1.0, 3.0, 4}, {2.0, 1.5, 4}};
  int bad_jobs = 0;
  double worst = 0.0;
  for (const auto& k : cases) {
    const auto t = simulate(chain({k.p}, {k.c}, constant_rate(k.rate, 400, 40)));
    for (const auto& j : t.jobs)
      if (j.wait != 0.0 || j.response() != k.c) ++bad_jobs;
    worst = std::max(worst, std::abs(measure_throughput(t, "s0") - k.rate) / k.rate);
  }
  return {bad_jobs == 0 && worst <= kThroughputTolerance,
          fmt::format("{} jobs with wait != 0 or response != c; worst throughput error {:.2f}% (<= {:.0f}%)", bad_jobs,
                      100 * worst, 100 * kThroughputTolerance)};
}

Outcome c4_dominance() {
  Rng rng(kSeed);
  int violations = 0;
  double tightest = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_comp = 2 + rng.index(2);
    const int n = 1 + static_cast<int>(rng.index(20));
    std::vector<int> p;
    std::vector<double> c;
    for (std::size_t k = 0; k < n_comp; ++k) {
      p.push_back(1 + static_cast<int>(rng.index(8)));
      c.push_back(rng.uniform(0.5, 5.0));
    }
    const auto ch = chain(p, c, batch(n));
    const double full = makespan(simulate(ch));
    double isolated = 0.0;
    for (const auto& comp : ch.workflow.components) {
      SimulationOptions o;
      o.only_component = comp.name;
      isolated += makespan(simulate(ch, 1, o));
    }
    if (full > isolated) ++violations;
    tightest = std::min(tightest, (isolated - full) / isolated);
  }
  return {violations == 0, fmt::format("{} violations in 50 chains; smallest relative slack {:.3f}", violations, tightest)};
}

Outcome c5_ridge() {
  Rng rng(kSeed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x(50, 5);
    Eigen::MatrixXd X(50, 5);
    Eigen::VectorXd Y(50);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      for (std::size_t j = 0; j < 5; ++j) X(i, j) = x(i, j) = rng.normal();
      Y(i) = y[i] = rng.normal() * 3 + 1;
    }
    const double alpha = std::exp(rng.uniform(std::log(0.01), std::log(1.0)));
    Hyperparameters hp;
    hp.algorithm = Algorithm::ridge;
    hp.values = {{"alpha", alpha}, {"fit_intercept", 0.0}};
    const auto model = fit(x, y, hp, 0);
    const auto& got = std::get<LinearParams>(model.params).coef;
    const Eigen::MatrixXd a = X.transpose() * X + alpha * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::VectorXd want = a.ldlt().solve(X.transpose() * Y);
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(got.data(), 5);
    worst = std::max(worst, (g - want).norm() / want.norm());
  }
  return {worst < kRidgeRelativeError, fmt::format("max relative error {:.2e} (< {:.0e})", worst, kRidgeRelativeError)};
}

Outcome c6_boosting() {
  Rng rng(kSeed);
  int violations = 0;
  std::size_t rounds = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + rng.index(50);
    Matrix x(n, 3);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.uniform(-2, 2);
      y[i] = 5 + x(i, 0) * x(i, 1) + std::sin(3 * x(i, 2)) + 0.3 * rng.normal();
    }
    Hyperparameters hp;
    hp.algorithm = Algorithm::gradient_boosting;
    hp.values = {{"n_estimators", 1000},
                 {"learning_rate", std::exp(rng.uniform(std::log(0.01), 0.0))},
                 {"gamma", rng.uniform(0, 1)},
                 {"max_depth", static_cast<double>(2 + rng.index(4))},
                 {"min_child_weight", 1},
                 {"early_stop", 0}};
    FitDiagnostics diag;
    fit(x, y, hp, static_cast<std::uint64_t>(trial), &diag);
    rounds += diag.training_mse.size();
    for (std::size_t r = 1; r < diag.training_mse.size(); ++r)
      if (diag.training_mse[r] > diag.training_mse[r - 1] * (1 + kMseRoundoff)) ++violations;
  }
  return {violations == 0 && rounds == 20000,
          fmt::format("{} increases over {} rounds on 20 datasets", violations, rounds)};
}

// Scaling campaign: per-job time 20 + 300/cores with 1% noise.
CampaignSpec interpolation_spec() {
  CampaignSpec s;
  s.name = "interpolation";
  s.workflow.name = "scaling";
  s.workflow.components = {component("work", "vm")};
  s.resources = {resource("vm", 4, {1, 2, 3, 4, 5, 6, 7, 8})};
  s.grid = {{"work", {4, 8, 12, 16, 20, 24, 28, 32}}};
  s.workloads = {batch(8)};
  s.laws = {{"work", law(20, 300, 0, 0.01)}};
  s.repetitions = 3;
  s.seed = kSeed;
  return s;
}

TrainingConfig interpolation_training() {
  TrainingConfig cfg;
  cfg.seed = kSeed;
  cfg.budget = kBudget;
  cfg.jobs = 4;
  cfg.target = "mean_job_s";
  cfg.recipe.features = {"cores"};
  cfg.recipe.transforms = {transform(TransformKind::inverse, "cores"), transform(TransformKind::normalize, "*")};
  cfg.split.kind = SplitKind::interpolation;
  cfg.split.column = "cores";
  cfg.split.values = {4, 12, 20, 28};
  return cfg;
}

Outcome interpolation_gate(const fs::path& dir) {
  fresh(dir);
  run_campaign(interpolation_spec(), dir / "campaign");
  const auto board = train(interpolation_training(), dir / "campaign" / "runs.csv", dir / "models");
  double worst = 0.0;
  std::string worst_label;
  for (const auto& e : board.entries) {
    const double m = e.error.empty() ? e.test_mape : INFINITY;
    if (m > worst) {
      worst = m;
      worst_label = e.label();
    }
  }
  const auto& best = board.best();
  return {best.test_mape < kInterpolationWinnerMape && worst < kAnyModelMape && board.entries.size() == 8,
          fmt::format("winner {} test MAPE {:.2f}% (< {}%); worst {} {:.2f}% (< {}%); {} experiments", best.label(),
                      best.test_mape, kInterpolationWinnerMape, worst_label, worst, kAnyModelMape,
                      board.entries.size())};
}

// Per-job time 2 + 40/cores + 0.5 batch with 1% noise.
Outcome extrapolation_gate(const fs::path& dir) {
  fresh(dir);
  CampaignSpec s;
  s.name = "extrapolation";
  s.workflow.name = "batching";
  s.workflow.components = {component("work", "vm")};
  s.resources = {resource("vm", 4, {1, 2, 3, 4})};
  s.grid = {{"work", {2, 4, 8, 16}}};
  s.workloads = {batch(5), batch(10), batch(15), batch(20)};
  s.laws = {{"work", law(2, 40, 0.5, 0.01)}};
  s.repetitions = 3;
  s.seed = kSeed;
  run_campaign(s, dir / "campaign");

  TrainingConfig cfg;
  cfg.seed = kSeed;
  cfg.budget = kBudget;
  cfg.jobs = 4;
  cfg.target = "mean_job_s";
  cfg.recipe.features = {"cores", "batch_size"};
  cfg.recipe.transforms = {transform(TransformKind::inverse, "cores"), transform(TransformKind::normalize, "*")};
  cfg.split.kind = SplitKind::extrapolation;
  cfg.split.column = "batch_size";
  cfg.split.threshold = 15;
  const auto board = train(cfg, dir / "campaign" / "runs.csv", dir / "models");
  const auto& best = board.best();
  return {best.test_mape < kExtrapolationMape,
          fmt::format("winner {} test MAPE {:.2f}% on batch 20 (< {}%)", best.label(), best.test_mape,
                      kExtrapolationMape)};
}

// Two-stage sync chain; the first stage saturates at 2 requests/s, the second
// at about 2.9.
Outcome sync_gate(const fs::path& dir) {
  fresh(dir);
  CampaignSpec s;
  s.name = "sync";
  s.workflow.name = "sync-chain";
  s.workflow.components = {component("front", "vm-a"), component("back", "vm-b")};
  s.resources = {resource("vm-a", 1, {2}), resource("vm-b", 1, {2})};
  s.grid = {{"front", {2}}, {"back", {2}}};
  s.workloads.clear();
  for (int k = 1; k <= 18; ++k) s.workloads.push_back(constant_rate(0.25 * k, 60, 10));
  s.laws = {{"front", law(1.0, 0, 0, 0.02)}, {"back", law(0.7, 0, 0, 0.02)}};
  s.repetitions = 2;
  s.seed = kSeed;
  run_campaign(s, dir / "campaign");
  const auto runs = dir / "campaign" / "runs.csv";

  ComponentModelSet models;
  models.workflow = s.workflow.name;
  for (const auto& c : s.workflow.components) {
    TrainingConfig cfg;
    cfg.seed = kSeed;
    cfg.budget = kBudget;
    cfg.jobs = 4;
    cfg.fold_column = "lambda";
    cfg.recipe.features = {"lambda"};
    cfg.recipe.transforms = {select("scope == " + c.name)};
    ComponentModels m;
    m.name = c.name;
    cfg.target = "mean_response_s";
    m.time = train(cfg, runs, dir / ("time_" + c.name)).best().model;
    cfg.target = "throughput_rps";
    m.throughput = train(cfg, runs, dir / ("out_" + c.name)).best().model;
    models.components.push_back(std::move(m));
  }

  // 20-point sweep against fresh simulations of the whole chain
  std::vector<double> lambdas, truth;
  std::string sweep = "lambda\n", truth_csv = "lambda,response_s\n";
  auto config = enumerate(s).configurations.front();
  for (int k = 0; k < 20; ++k) {
    const double lambda = 0.3 + 0.2 * k;
    config.workload = constant_rate(lambda, 60, 10);
    double sum = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      SimulationOptions o;
      sum += mean_response(simulate_run(s.workflow, s.resources, config, s.laws,
                                        derive_seed(kSeed, fmt::format("truth/{}/{}", k, rep)), o));
    }
    lambdas.push_back(lambda);
    truth.push_back(sum / 3);
    sweep += csv::format_number(lambda) + "\n";
    truth_csv += csv::format_number(lambda) + "," + csv::format_number(truth.back()) + "\n";
  }
  std::ofstream(dir / "sweep.csv") << sweep;
  std::ofstream(dir / "truth.csv") << truth_csv;
  predict_sweep(models, (dir / "sweep.csv").string(), (dir / "pred_propagated.csv").string(), true);
  predict_sweep(models, (dir / "sweep.csv").string(), (dir / "pred_raw.csv").string(), false);

  std::vector<double> prop, raw;
  const std::vector<FeatureRow> rows(2);
  for (double lambda : lambdas) {
    prop.push_back(predict_sync_rows(models, rows, lambda, true).total);
    raw.push_back(predict_sync_rows(models, rows, lambda, false).total);
  }
  const double mp = mape(truth, prop), mr = mape(truth, raw);
  return {mp < mr, fmt::format("propagated-rate MAPE {:.2f}% vs raw-rate MAPE {:.2f}%", mp, mr)};
}

Outcome c7() { return interpolation_gate(g_work / "c7"); }
Outcome c8() { return extrapolation_gate(g_work / "c8"); }
Outcome c9() { return sync_gate(g_work / "c9"); }

std::vector<fs::path> csv_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome c10_determinism() {
  std::size_t compared = 0, differing = 0;
  for (const char* name : {"c7", "c8", "c9"}) {
    const auto a = g_work / "det_a" / name;
    const auto b = g_work / "det_b" / name;
    for (const auto& dir : {a, b}) {
      if (std::string(name) == "c7") interpolation_gate(dir);
      if (std::string(name) == "c8") extrapolation_gate(dir);
      if (std::string(name) == "c9") sync_gate(dir);
    }
    const auto files = csv_files(a);
    if (files != csv_files(b)) ++differing;
    for (const auto& f : files) {
      ++compared;
      if (slurp(a / f) != slurp(b / f)) ++differing;
    }
  }
  return {differing == 0 && compared > 0,
          fmt::format("{} CSV files compared across two runs, {} differ", compared, differing)};
}

// Kills its own process when asked for a chosen run, mid-campaign.
class KillingBackend : public Backend {
public:
  KillingBackend(CampaignSpec spec, std::string victim) : inner_(std::move(spec)), victim_(std::move(victim)) {}
  RunTrace run(const PlannedRun& r) override {
    if (r.run_id == victim_) ::kill(::getpid(), SIGKILL);
    return inner_.run(r);
  }

private:
  SimulatorBackend inner_;
  std::string victim_;
};

Outcome c11_resume() {
  const auto spec = interpolation_spec();
  const auto plan = plan_campaign(spec);
  const std::size_t kill_at = 10;
  const auto straight = fresh(g_work / "c11" / "straight");
  const auto killed = fresh(g_work / "c11" / "killed");
  run_campaign(spec, straight);

  std::fflush(nullptr);
  const pid_t child = ::fork();
  if (child == 0) {
    KillingBackend backend(spec, plan.runs[kill_at].run_id);
    ExecuteOptions o;
    o.output_dir = killed.string();
    execute_campaign(plan, backend, o);
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(child, &status, 0);
  const bool was_killed = WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL;

  SimulatorBackend backend(spec);
  ExecuteOptions o;
  o.output_dir = killed.string();
  const auto r = execute_campaign(plan, backend, o);
  std::vector<std::string> expected;
  for (std::size_t i = kill_at; i < plan.runs.size(); ++i) expected.push_back(plan.runs[i].run_id);
  const bool exact_rest = r.executed == expected;
  const bool same = slurp(killed / "jobs.csv") == slurp(straight / "jobs.csv") &&
                    slurp(killed / "runs.csv") == slurp(straight / "runs.csv");
  return {was_killed && exact_rest && same && r.complete,
          fmt::format("killed after {} of {} runs; resume executed {} runs ({}); merged CSVs {}", kill_at,
                      plan.runs.size(), r.executed.size(), exact_rest ? "exactly the rest" : "unexpected set",
                      same ? "identical" : "differ")};
}

Outcome c12_budget() {
  Rng rng(kSeed);
  std::vector<std::string> names{"cores", "batch_size", "runtime_s"};
  Matrix m(60, 3);
  for (std::size_t i = 0; i < 60; ++i) {
    m(i, 0) = static_cast<double>(1 + rng.index(32));
    m(i, 1) = static_cast<double>(1 + rng.index(20));
    m(i, 2) = (3 + 50 / m(i, 0) + 0.4 * m(i, 1)) * (1 + 0.02 * rng.normal());
  }
  const auto d = make_dataset(names, m, "runtime_s", {"cores", "batch_size"});
  TrainingConfig cfg;
  cfg.seed = kSeed;
  cfg.budget = kBudget;
  cfg.jobs = 4;
  cfg.recipe.features = {"cores", "batch_size"};
  cfg.split.kind = SplitKind::holdout;
  cfg.split.fraction = 0.2;
  const auto board = run_experiments(cfg, d);
  int wrong_budget = 0, outside = 0, samples = 0;
  for (const auto& e : board.entries) {
    if (e.evaluations != kBudget || e.trials.size() != static_cast<std::size_t>(kBudget)) ++wrong_budget;
    const auto priors = cfg.priors_for(e.algorithm);
    for (const auto& t : e.trials) {
      ++samples;
      for (const auto& [name, prior] : priors) {
        bool ok;
        if (!prior.label.empty()) {
          const auto it = t.hp.labels.find(name);
          ok = it != t.hp.labels.end() && it->second == prior.label;
        } else {
          const auto it = t.hp.values.find(name);
          ok = it != t.hp.values.end() && prior.contains(it->second);
        }
        if (!ok) ++outside;
      }
    }
  }
  return {wrong_budget == 0 && outside == 0 && board.entries.size() == 8,
          fmt::format("{} experiments, {} with a budget other than {}; {} of {} sampled sets outside the priors",
                      board.entries.size(), wrong_budget, kBudget, outside, samples)};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "faasprof_acceptance";
  std::set<std::string> only;
  for (int i = 2; i < argc; ++i) only.insert(argv[i]);
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria{
      {"C1", "enumeration exactness", 1, c1_enumeration},
      {"C2", "simulator wave oracle", 5, c2_wave},
      {"C3", "sync no-queueing oracle", 5, c3_no_queueing},
      {"C4", "pipeline dominance", 30, c4_dominance},
      {"C5", "ridge oracle equivalence", 5, c5_ridge},
      {"C6", "boosting monotonicity", 60, c6_boosting},
      {"C7", "interpolation gate", 600, c7},
      {"C8", "extrapolation gate", 600, c8},
      {"C9", "sync chaining gate", 600, c9},
      {"C10", "determinism", 1200, c10_determinism},
      {"C11", "campaign resilience", 120, c11_resume},
      {"C12", "BO budget contract", 60, c12_budget},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {} s limit", c.limit_s);
    }
    failed += !o.pass;
    std::printf("%-4s %s  %s: %s [%.2f s]\n", c.id.c_str(), o.pass ? "PASS" : "FAIL", c.title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
