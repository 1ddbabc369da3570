#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sim/simulator.hpp"
#include "workflow/workflow.hpp"

namespace faasprof {

struct CampaignSpec {
  std::string name;
  WorkflowSpec workflow;
  std::vector<Resource> resources;
  ParallelismGrid grid;
  std::vector<WorkloadSpec> workloads{WorkloadSpec{}};
  LawMap laws;
  int repetitions = 3;
  SelectionStrategy selection = SelectionStrategy::all;
  bool single_component = true;  // isolated runs of every component after each full run
  std::uint64_t seed = 1;
  std::size_t saturation_cap = kDefaultSaturationCap;
  std::string output_dir = "campaign_out";

  // Every problem with the spec; empty when it can be planned.
  std::vector<std::string> validation_issues() const;
};

struct Enumeration {
  std::vector<TestingUnit> units;
  std::vector<Deployment> deployments;
  std::vector<RunConfiguration> configurations;  // deployments x workloads x parallelism grid
  TrainTestConfigurations selection;
};

Enumeration enumerate(const CampaignSpec& spec);

struct PlannedRun {
  std::string run_id;
  std::string scope;  // "full" or the component run in isolation
  int rep = 1;
  std::uint64_t seed = 0;
  RunConfiguration configuration;
};

struct CampaignPlan {
  std::string workflow;
  std::string digest;
  std::vector<PlannedRun> runs;
};

// Selected configurations in order; per configuration the full run, then
// each component alone, each repeated. Throws ConfigError when nothing is
// selected.
CampaignPlan plan_campaign(const CampaignSpec& spec);

// Stable hash of everything that determines the runs (not the output path).
std::string spec_digest(const CampaignSpec& spec);

class Backend {
public:
  virtual ~Backend() = default;
  // Must be safe to call concurrently for distinct runs.
  virtual RunTrace run(const PlannedRun& run) = 0;
};

class SimulatorBackend : public Backend {
public:
  explicit SimulatorBackend(CampaignSpec spec) : spec_(std::move(spec)) {}
  RunTrace run(const PlannedRun& run) override;

private:
  CampaignSpec spec_;
};

struct ExecuteOptions {
  std::string output_dir;
  int jobs = 1;
  std::optional<std::size_t> stop_after;  // execute at most this many runs, then stop
};

struct CampaignResult {
  std::vector<RunTrace> traces;  // successful runs, plan order, including resumed ones
  std::vector<std::string> executed;  // run ids executed by this call, in completion order
  std::vector<std::pair<std::string, std::string>> failures;  // (run id, reason), plan order
  bool complete = false;
};

// Executes pending runs, checkpointing <output_dir>/state.json after each one
// and keeping every trace under <output_dir>/traces. Resumes from an existing
// state with the same digest; throws StateError on a mismatch. Once every run
// is processed writes jobs.csv, runs.csv and failures.txt.
CampaignResult execute_campaign(const CampaignPlan& plan, Backend& backend, const ExecuteOptions& options);

// Per-job rows under the fixed header. Throws DataError for mixed workflows.
void write_job_csv(const std::vector<RunTrace>& traces, const std::string& path);
// Per-run aggregates: one row per stage, one per partitioned component, and
// one "workflow" row for multi-stage full runs.
void write_run_csv(const std::vector<RunTrace>& traces, const std::string& path);

}  // namespace faasprof
