#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sim/types.hpp"

namespace faasprof {

struct Resource {
  std::string name;
  int cores_per_node = 1;
  std::vector<int> node_counts{1};
  bool unbounded = false;  // Lambda-like: no parallelism cap
  double cold_start_overhead = 0.0;
  double warm_fraction = 0.0;

  // Largest parallelism level the resource can host (one core per pod).
  long capacity() const;
};

struct Partition {
  std::string name;
  int index = 1;  // position in the sequential chain, contiguous from 1
  std::vector<std::string> compatible_resources;
  double transfer_delay = 0.0;  // seconds to the next partition
};

struct Component {
  std::string name;
  std::vector<Partition> partitions;  // empty if unpartitioned
  std::vector<std::string> compatible_resources;
};

// Components in chain order; branching workflows are declared in topological
// order and executed as a chain.
struct WorkflowSpec {
  std::string name;
  std::vector<Component> components;

  const Component* find(const std::string& component) const;
};

const Resource* find_resource(std::span<const Resource> resources, const std::string& name);

// Every violated invariant, as human-readable diagnostics.
std::vector<std::string> validation_issues(const WorkflowSpec& workflow,
                                           std::span<const Resource> resources);

struct Assignment {
  std::string target;  // component name, or partition name when partitioned
  std::string resource;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct TestingUnit {
  std::string component;
  bool partitioned = false;
  std::vector<Assignment> assignments;  // one entry when not partitioned

  std::string label() const;
  friend bool operator==(const TestingUnit&, const TestingUnit&) = default;
};

struct Deployment {
  std::vector<TestingUnit> units;  // one per component, in workflow order

  std::string label() const;
  friend bool operator==(const Deployment&, const Deployment&) = default;
};

// One executable step of a deployment: a whole component or one partition.
struct Stage {
  std::string name;
  std::string component;
  std::string resource;
  double transfer_delay = 0.0;  // applied before the next stage, same component only
  bool last_of_component = true;
};

std::vector<Stage> stages_of(const WorkflowSpec& workflow, const Deployment& deployment);

// Parallelism level per stage name. Absent on unbounded resources.
using ParallelismMap = std::map<std::string, int>;
// Candidate parallelism levels, keyed by component or partition name.
using ParallelismGrid = std::map<std::string, std::vector<int>>;

struct RunConfiguration {
  std::size_t index = 0;  // position in the full expanded list
  Deployment deployment;
  ParallelismMap parallelism;
  WorkloadSpec workload;

  std::optional<int> parallelism_of(const std::string& stage) const;
  // Canonical, human-readable identity of the configuration.
  std::string key() const;
};

std::vector<TestingUnit> enumerate_testing_units(const WorkflowSpec& workflow,
                                                 std::span<const Resource> resources);

std::vector<Deployment> enumerate_deployments(const WorkflowSpec& workflow,
                                              std::span<const TestingUnit> units);

std::vector<RunConfiguration> expand_configurations(const WorkflowSpec& workflow,
                                                    const Deployment& deployment,
                                                    const ParallelismGrid& grid,
                                                    std::span<const Resource> resources,
                                                    const WorkloadSpec& workload = {});

enum class SelectionStrategy { all, extremes };

struct TrainTestConfigurations {
  std::vector<RunConfiguration> train;
  std::vector<RunConfiguration> test;
};

TrainTestConfigurations select_training_configurations(std::span<const RunConfiguration> configs,
                                                       SelectionStrategy strategy);

}  // namespace faasprof
