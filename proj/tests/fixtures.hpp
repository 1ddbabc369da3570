#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "sim/simulator.hpp"
#include "workflow/workflow.hpp"

namespace fixtures {

using namespace faasprof;

// A chain of unpartitioned components, each on its own one-core-per-node
// resource with room for 64 pods.
struct Chain {
  WorkflowSpec workflow;
  std::vector<Resource> resources;
  LawMap laws;
  RunConfiguration config;
};

inline Chain chain(const std::vector<std::pair<std::string, int>>& components, const WorkloadSpec& w,
                   double warm_fraction = 1.0) {
  Chain c;
  c.workflow.name = "chain";
  for (const auto& [name, p] : components) {
    Resource r;
    r.name = "res-" + name;
    r.cores_per_node = 1;
    r.node_counts = {64};
    r.warm_fraction = warm_fraction;
    c.resources.push_back(r);
    Component comp;
    comp.name = name;
    comp.compatible_resources = {r.name};
    c.workflow.components.push_back(comp);
    c.config.deployment.units.push_back(TestingUnit{name, false, {{name, r.name}}});
    c.config.parallelism[name] = p;
  }
  c.config.workload = w;
  return c;
}

inline WorkloadSpec batch(int n) {
  WorkloadSpec w;
  w.mode = WorkloadMode::async_batch;
  w.batch_size = n;
  return w;
}

inline WorkloadSpec constant_rate(double rate, double duration, double ramp_up) {
  WorkloadSpec w;
  w.mode = WorkloadMode::sync;
  w.arrival = ArrivalKind::constant;
  w.rate = rate;
  w.duration = duration;
  w.ramp_up = ramp_up;
  return w;
}

inline ServiceLaw fixed(double compute) {
  ServiceLaw l;
  l.base = compute;
  return l;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("faasprof_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
