#include <doctest.h>

#include <cmath>
#include <set>

#include "campaign/campaign.hpp"
#include "campaign/trace_json.hpp"
#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "fixtures.hpp"

using namespace faasprof;
namespace fs = std::filesystem;

namespace {

CampaignSpec small_spec() {
  auto c = fixtures::chain({{"a", 1}, {"b", 1}}, fixtures::batch(6));
  CampaignSpec s;
  s.name = "small";
  s.workflow = c.workflow;
  s.resources = c.resources;
  s.grid = {{"a", {1, 2, 3}}, {"b", {2}}};
  s.workloads = {c.config.workload};
  s.laws = {{"a", fixtures::fixed(2)}, {"b", fixtures::fixed(1)}};
  s.laws["a"].noise = {NoiseKind::lognormal, 0.1};
  s.laws["b"].pod_creation = 0.5;
  s.repetitions = 1;
  s.seed = 21;
  return s;
}

class FlakyBackend : public Backend {
public:
  FlakyBackend(CampaignSpec spec, std::string bad) : inner_(std::move(spec)), bad_(std::move(bad)) {}
  RunTrace run(const PlannedRun& r) override {
    if (r.run_id == bad_) throw NumericError("injected failure");
    return inner_.run(r);
  }

private:
  SimulatorBackend inner_;
  std::string bad_;
};

CampaignResult run_all(const CampaignSpec& spec, const fs::path& dir, std::optional<std::size_t> stop = {},
                       int jobs = 1) {
  SimulatorBackend b(spec);
  ExecuteOptions o;
  o.output_dir = dir.string();
  o.stop_after = stop;
  o.jobs = jobs;
  return execute_campaign(plan_campaign(spec), b, o);
}

}  // namespace

TEST_CASE("plan sizes follow configurations, scopes and repetitions") {
  auto s = small_spec();
  const auto plan = plan_campaign(s);
  CHECK(plan.runs.size() == 9);
  std::set<std::string> ids;
  for (const auto& r : plan.runs) ids.insert(r.run_id);
  CHECK(ids.size() == 9);
  CHECK(plan.runs[0].run_id == "c0000-full-r1");
  CHECK(plan.runs[1].scope == "a");

  s.repetitions = 3;
  CHECK(plan_campaign(s).runs.size() == 27);
  s.single_component = false;
  CHECK(plan_campaign(s).runs.size() == 9);

  auto one = small_spec();
  one.workflow.components.pop_back();
  one.resources.pop_back();
  one.grid.erase("b");
  one.laws.erase("b");
  CHECK(plan_campaign(one).runs.size() == 3);
}

TEST_CASE("seeds and digests are stable") {
  const auto s = small_spec();
  const auto a = plan_campaign(s);
  const auto b = plan_campaign(s);
  for (std::size_t i = 0; i < a.runs.size(); ++i) CHECK(a.runs[i].seed == b.runs[i].seed);
  CHECK(a.digest == b.digest);
  auto other = s;
  other.seed = 22;
  CHECK(spec_digest(other) != a.digest);
  other = s;
  other.output_dir = "elsewhere";
  CHECK(spec_digest(other) == a.digest);
}

TEST_CASE("invalid campaign specs report every issue") {
  auto s = small_spec();
  s.laws.erase("b");
  s.laws["ghost"] = fixtures::fixed(1);
  s.repetitions = 0;
  const auto issues = s.validation_issues();
  CHECK(issues.size() == 3);
  CHECK_THROWS_AS(plan_campaign(s), ConfigError);
}

TEST_CASE("a campaign executes every planned run and writes CSVs") {
  const auto dir = fixtures::scratch("camp_full");
  const auto r = run_all(small_spec(), dir);
  CHECK(r.complete);
  CHECK(r.traces.size() == 9);
  CHECK(r.executed.size() == 9);
  CHECK(r.failures.empty());
  for (const char* f : {"state.json", "jobs.csv", "runs.csv", "failures.txt"}) CHECK(fs::exists(dir / f));
  CHECK(fixtures::read_text(dir / "failures.txt").empty());

  const auto jobs = load_dataset((dir / "jobs.csv").string());
  // full runs: 6 jobs per stage; isolated runs: 6 jobs
  CHECK(jobs.rows() == 3 * (12 + 6 + 6));
  const auto runs = load_dataset((dir / "runs.csv").string());
  // full runs: two stage rows plus the workflow row; isolated runs: one row
  CHECK(runs.rows() == 3 * (3 + 1 + 1));
}

TEST_CASE("interrupted campaign resumes to the same outputs") {
  const auto spec = small_spec();
  const auto straight = fixtures::scratch("camp_straight");
  run_all(spec, straight);

  const auto resumed = fixtures::scratch("camp_resumed");
  const auto first = run_all(spec, resumed, 4);
  CHECK_FALSE(first.complete);
  CHECK(first.executed.size() == 4);
  CHECK_FALSE(fs::exists(resumed / "jobs.csv"));
  const auto second = run_all(spec, resumed, std::nullopt, 3);
  CHECK(second.complete);
  CHECK(second.executed.size() == 5);
  CHECK(second.traces.size() == 9);
  const auto third = run_all(spec, resumed);
  CHECK(third.executed.empty());

  CHECK(fixtures::read_text(resumed / "jobs.csv") == fixtures::read_text(straight / "jobs.csv"));
  CHECK(fixtures::read_text(resumed / "runs.csv") == fixtures::read_text(straight / "runs.csv"));
}

TEST_CASE("resuming with a different spec is refused") {
  const auto dir = fixtures::scratch("camp_digest");
  auto spec = small_spec();
  run_all(spec, dir, 2);
  spec.seed = 99;
  CHECK_THROWS_AS(run_all(spec, dir), StateError);
}

TEST_CASE("failed runs are recorded and not retried") {
  const auto dir = fixtures::scratch("camp_fail");
  const auto spec = small_spec();
  const auto plan = plan_campaign(spec);
  FlakyBackend b(spec, "c0001-a-r1");
  ExecuteOptions o;
  o.output_dir = dir.string();
  const auto r = execute_campaign(plan, b, o);
  CHECK(r.complete);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].first == "c0001-a-r1");
  CHECK(r.traces.size() == 8);
  CHECK(fixtures::read_text(dir / "failures.txt").find("c0001-a-r1\tinjected failure") != std::string::npos);
  SimulatorBackend good(spec);
  const auto again = execute_campaign(plan, good, o);
  CHECK(again.executed.empty());
  CHECK(again.failures.size() == 1);
}

TEST_CASE("an empty plan completes with header-only files") {
  const auto dir = fixtures::scratch("camp_empty");
  CampaignPlan plan;
  plan.workflow = "none";
  plan.digest = "0";
  SimulatorBackend b(small_spec());
  ExecuteOptions o;
  o.output_dir = dir.string();
  const auto r = execute_campaign(plan, b, o);
  CHECK(r.complete);
  CHECK(r.traces.empty());
  CHECK(fixtures::read_text(dir / "jobs.csv").find('\n') == fixtures::read_text(dir / "jobs.csv").size() - 1);
}

TEST_CASE("job CSV has one row per job with six-decimal values") {
  auto c = fixtures::chain({{"a", 4}}, fixtures::batch(10));
  c.laws["a"] = fixtures::fixed(5);
  c.laws["a"].noise = {NoiseKind::normal, 0.2};
  auto t = simulate_run(c.workflow, c.resources, c.config, c.laws, 3);
  t.run_id = "c0000-full-r1";
  const auto dir = fixtures::scratch("camp_jobs");
  write_job_csv({t}, (dir / "jobs.csv").string());
  const auto d = load_dataset((dir / "jobs.csv").string());
  REQUIRE(d.rows() == 10);
  CHECK(d.cols() == 12);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(std::abs(d.numeric("compute_s")[i] - t.jobs[i].compute) <= 5e-7);
    CHECK(std::abs(d.numeric("runtime_s")[i] - t.jobs[i].response()) <= 5e-7);
    CHECK(d.numeric("cores")[i] == 4.0);
    CHECK(d.numeric("batch_size")[i] == 10.0);
  }
  CHECK(d.column("component").text[0] == "a");
}

TEST_CASE("run CSV reports the wave makespan") {
  auto c = fixtures::chain({{"a", 4}}, fixtures::batch(10));
  c.laws["a"] = fixtures::fixed(5);
  auto t = simulate_run(c.workflow, c.resources, c.config, c.laws, 1);
  t.run_id = "c0000-full-r1";
  const auto dir = fixtures::scratch("camp_runs");
  write_run_csv({t}, (dir / "runs.csv").string());
  const auto text = fixtures::read_text(dir / "runs.csv");
  CHECK(text.find(",15.000000,") != std::string::npos);
  const auto d = load_dataset((dir / "runs.csv").string());
  CHECK(d.rows() == 1);
  CHECK(d.numeric("runtime_s")[0] == 15.0);
  CHECK(d.numeric("mean_job_s")[0] == 5.0);
  CHECK(std::isnan(d.numeric("throughput_rps")[0]));
}

TEST_CASE("traces survive a JSON round trip exactly") {
  auto c = fixtures::chain({{"a", 3}, {"b", 2}}, fixtures::constant_rate(1.3, 30, 3), 0.4);
  c.laws["a"] = fixtures::fixed(1.1);
  c.laws["a"].noise = {NoiseKind::lognormal, 0.3};
  c.laws["b"] = fixtures::fixed(0.7);
  c.laws["b"].pod_creation = 0.3;
  const auto t = simulate_run(c.workflow, c.resources, c.config, c.laws, 77);
  const auto back = trace_from_json(trace_to_json(t));
  REQUIRE(back.jobs.size() == t.jobs.size());
  for (std::size_t i = 0; i < t.jobs.size(); ++i) {
    CHECK(back.jobs[i].end_time == t.jobs[i].end_time);
    CHECK(back.jobs[i].compute == t.jobs[i].compute);
    CHECK(back.jobs[i].stage == t.jobs[i].stage);
  }
  CHECK(back.configuration.key() == t.configuration.key());
  CHECK(back.injected == t.injected);
}

TEST_CASE("traces from different workflows cannot share a CSV") {
  auto c = fixtures::chain({{"a", 1}}, fixtures::batch(1));
  c.laws["a"] = fixtures::fixed(1);
  auto t1 = simulate_run(c.workflow, c.resources, c.config, c.laws, 1);
  auto t2 = t1;
  t2.workflow = "other";
  const auto dir = fixtures::scratch("camp_mixed");
  CHECK_THROWS_AS(write_job_csv({t1, t2}, (dir / "jobs.csv").string()), DataError);
  CHECK_THROWS_AS(write_run_csv({t1, t2}, (dir / "runs.csv").string()), DataError);
}
