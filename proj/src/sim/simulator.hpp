#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sim/types.hpp"
#include "workflow/workflow.hpp"

namespace faasprof {

// Laws keyed by stage name; a partition without its own entry falls back to
// its component's law.
using LawMap = std::map<std::string, ServiceLaw>;

// One job of one stage, with the four timeline intervals:
//   upload_time --wait--> start_time --pod_creation--> --overhead--> --compute--> end_time
// wait covers both scheduling and queueing for a busy pod.
struct JobRecord {
  std::size_t job_id = 0;
  std::size_t request_id = 0;  // injected input this job descends from
  std::string stage;
  std::string component;
  double wait = 0.0;
  double pod_creation = 0.0;
  double overhead = 0.0;
  double compute = 0.0;
  double upload_time = 0.0;
  double start_time = 0.0;
  double end_time = 0.0;
  std::size_t pod = 0;

  double response() const { return end_time - upload_time; }
  double service() const { return pod_creation + overhead + compute; }
};

struct StageRun {
  Stage stage;
  std::optional<int> parallelism;  // absent when unbounded
  double completion_time = 0.0;    // last end_time on this stage
};

inline constexpr std::size_t kDefaultSaturationCap = 10000;

struct SimulationOptions {
  // Run a single component fed by the synthetic input instead of the chain.
  std::optional<std::string> only_component;
  std::size_t saturation_cap = kDefaultSaturationCap;
};

struct RunTrace {
  std::string run_id;
  std::string workflow;
  std::string scope = "full";
  int rep = 1;
  std::uint64_t seed = 0;
  RunConfiguration configuration;
  std::vector<StageRun> stages;
  std::vector<JobRecord> jobs;  // in completion order
  std::size_t injected = 0;     // inputs accepted at the entry stage
  std::size_t dropped = 0;      // inputs refused once the entry queue hit the cap
  bool saturated = false;

  const StageRun* find_stage(const std::string& name) const;
};

RunTrace simulate_run(const WorkflowSpec& workflow, std::span<const Resource> resources,
                      const RunConfiguration& config, const LawMap& laws, std::uint64_t seed,
                      const SimulationOptions& options = {});

// Time from the first upload to the last completion, over all jobs or over
// the jobs of one component (or one stage).
double makespan(const RunTrace& trace, const std::optional<std::string>& component = std::nullopt);

// Completions of the component's exit stage inside the measurement window
// [ramp_up, duration] divided by the window length. Sync traces only.
double measure_throughput(const RunTrace& trace, const std::string& component);

// Mean per-job response time (end - upload) of a component's jobs; for sync
// traces only inputs uploaded inside the measurement window count. Without a
// component, end-to-end time per request from the first stage upload to the
// last stage completion.
double mean_response(const RunTrace& trace, const std::optional<std::string>& component = std::nullopt);

// Mean busy time (pod_creation + overhead + compute) of a component's jobs.
double mean_job_time(const RunTrace& trace, const std::string& component);

}  // namespace faasprof
