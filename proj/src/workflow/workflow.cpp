#include "workflow/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"

namespace faasprof {

long Resource::capacity() const {
  if (node_counts.empty()) return 0;
  return static_cast<long>(*std::max_element(node_counts.begin(), node_counts.end())) *
         cores_per_node;
}

const Component* WorkflowSpec::find(const std::string& component) const {
  for (const auto& c : components)
    if (c.name == component) return &c;
  return nullptr;
}

const Resource* find_resource(std::span<const Resource> resources, const std::string& name) {
  for (const auto& r : resources)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<std::string> validation_issues(const WorkflowSpec& workflow,
                                           std::span<const Resource> resources) {
  std::vector<std::string> issues;
  std::set<std::string> names;
  for (const auto& r : resources) {
    if (r.name.empty()) issues.push_back("resource with empty name");
    if (!names.insert(r.name).second) issues.push_back(fmt::format("duplicate resource '{}'", r.name));
    if (!r.unbounded) {
      if (r.cores_per_node < 1)
        issues.push_back(fmt::format("resource '{}': cores_per_node must be positive", r.name));
      if (r.node_counts.empty())
        issues.push_back(fmt::format("resource '{}': node_counts must not be empty", r.name));
      for (int n : r.node_counts)
        if (n < 1) issues.push_back(fmt::format("resource '{}': node counts must be positive", r.name));
    }
    if (!(r.warm_fraction >= 0.0 && r.warm_fraction <= 1.0))
      issues.push_back(fmt::format("resource '{}': warm_fraction must lie in [0,1]", r.name));
    if (!(r.cold_start_overhead >= 0.0) || !std::isfinite(r.cold_start_overhead))
      issues.push_back(fmt::format("resource '{}': cold_start_overhead must be >= 0", r.name));
  }

  if (workflow.components.empty()) issues.push_back("workflow has no components");
  std::set<std::string> stage_names;
  auto check_refs = [&](const std::vector<std::string>& refs, const std::string& owner) {
    for (const auto& ref : refs)
      if (!find_resource(resources, ref))
        issues.push_back(fmt::format("'{}' references undefined resource '{}'", owner, ref));
  };
  for (const auto& c : workflow.components) {
    if (c.name.empty()) issues.push_back("component with empty name");
    if (!stage_names.insert(c.name).second)
      issues.push_back(fmt::format("duplicate component or partition name '{}'", c.name));
    check_refs(c.compatible_resources, c.name);
    for (std::size_t i = 0; i < c.partitions.size(); ++i) {
      const auto& p = c.partitions[i];
      if (!stage_names.insert(p.name).second)
        issues.push_back(fmt::format("duplicate component or partition name '{}'", p.name));
      if (p.index != static_cast<int>(i) + 1)
        issues.push_back(fmt::format("component '{}': partition indices must be contiguous from 1", c.name));
      if (p.compatible_resources.empty())
        issues.push_back(fmt::format("partition '{}' names no compatible resource", p.name));
      if (!std::isfinite(p.transfer_delay) || p.transfer_delay < 0.0)
        issues.push_back(fmt::format("partition '{}': transfer_delay must be finite and >= 0", p.name));
      check_refs(p.compatible_resources, p.name);
    }
    if (c.compatible_resources.empty() && c.partitions.empty())
      issues.push_back(fmt::format("component '{}' names no compatible resource", c.name));
  }
  return issues;
}

std::string TestingUnit::label() const {
  std::string out;
  for (const auto& a : assignments) {
    if (!out.empty()) out += '+';
    out += a.target + '@' + a.resource;
  }
  return out;
}

std::string Deployment::label() const {
  std::string out;
  for (const auto& u : units) {
    if (!out.empty()) out += ' ';
    out += u.label();
  }
  return out;
}

std::vector<Stage> stages_of(const WorkflowSpec& workflow, const Deployment& deployment) {
  std::vector<Stage> stages;
  for (const auto& unit : deployment.units) {
    const Component* comp = workflow.find(unit.component);
    if (!comp) throw ConfigError(fmt::format("deployment names unknown component '{}'", unit.component));
    for (std::size_t i = 0; i < unit.assignments.size(); ++i) {
      Stage s;
      s.name = unit.assignments[i].target;
      s.component = unit.component;
      s.resource = unit.assignments[i].resource;
      s.last_of_component = i + 1 == unit.assignments.size();
      if (unit.partitioned && !s.last_of_component) s.transfer_delay = comp->partitions[i].transfer_delay;
      stages.push_back(std::move(s));
    }
  }
  return stages;
}

std::optional<int> RunConfiguration::parallelism_of(const std::string& stage) const {
  auto it = parallelism.find(stage);
  if (it == parallelism.end()) return std::nullopt;
  return it->second;
}

std::string RunConfiguration::key() const {
  std::string out;
  for (const auto& unit : deployment.units) {
    for (const auto& a : unit.assignments) {
      if (!out.empty()) out += ' ';
      out += a.target + '@' + a.resource;
      if (auto p = parallelism_of(a.target)) out += fmt::format(":{}", *p);
    }
  }
  return out + " " + workload.label();
}

namespace {

std::vector<std::string> sorted_valid(const std::vector<std::string>& refs,
                                      std::span<const Resource> resources) {
  std::set<std::string> valid;
  for (const auto& r : refs)
    if (find_resource(resources, r)) valid.insert(r);
  return {valid.begin(), valid.end()};
}

// Odometer over a list of radices; last position varies fastest.
template <class F>
void for_each_combination(const std::vector<std::size_t>& radices, F&& visit) {
  for (std::size_t r : radices)
    if (r == 0) return;
  std::vector<std::size_t> digits(radices.size(), 0);
  while (true) {
    visit(digits);
    std::size_t pos = radices.size();
    while (pos > 0) {
      --pos;
      if (++digits[pos] < radices[pos]) break;
      digits[pos] = 0;
      if (pos == 0) return;
    }
    if (radices.empty()) return;
  }
}

}  // namespace

std::vector<TestingUnit> enumerate_testing_units(const WorkflowSpec& workflow,
                                                 std::span<const Resource> resources) {
  std::vector<TestingUnit> units;
  for (const auto& comp : workflow.components) {
    const std::size_t before = units.size();
    for (const auto& res : sorted_valid(comp.compatible_resources, resources))
      units.push_back(TestingUnit{comp.name, false, {Assignment{comp.name, res}}});

    if (!comp.partitions.empty()) {
      std::vector<std::vector<std::string>> options;
      std::vector<std::size_t> radices;
      for (const auto& p : comp.partitions) {
        options.push_back(sorted_valid(p.compatible_resources, resources));
        radices.push_back(options.back().size());
      }
      for_each_combination(radices, [&](const std::vector<std::size_t>& digits) {
        TestingUnit u{comp.name, true, {}};
        for (std::size_t i = 0; i < digits.size(); ++i)
          u.assignments.push_back(Assignment{comp.partitions[i].name, options[i][digits[i]]});
        units.push_back(std::move(u));
      });
    }
    if (units.size() == before)
      throw ConfigError(fmt::format("component '{}' has no valid placement on the declared resources",
                                    comp.name));
  }
  return units;
}

std::vector<Deployment> enumerate_deployments(const WorkflowSpec& workflow,
                                              std::span<const TestingUnit> units) {
  std::vector<std::vector<const TestingUnit*>> per_component;
  std::vector<std::size_t> radices;
  for (const auto& comp : workflow.components) {
    std::vector<const TestingUnit*> mine;
    for (const auto& u : units)
      if (u.component == comp.name) mine.push_back(&u);
    if (mine.empty())
      throw ConfigError(fmt::format("no testing unit covers component '{}'", comp.name));
    radices.push_back(mine.size());
    per_component.push_back(std::move(mine));
  }
  std::vector<Deployment> out;
  for_each_combination(radices, [&](const std::vector<std::size_t>& digits) {
    Deployment d;
    for (std::size_t i = 0; i < digits.size(); ++i) d.units.push_back(*per_component[i][digits[i]]);
    out.push_back(std::move(d));
  });
  return out;
}

std::vector<RunConfiguration> expand_configurations(const WorkflowSpec& workflow,
                                                    const Deployment& deployment,
                                                    const ParallelismGrid& grid,
                                                    std::span<const Resource> resources,
                                                    const WorkloadSpec& workload) {
  std::vector<std::string> targets;
  std::vector<std::vector<int>> levels;
  std::vector<std::string> issues;
  for (const auto& stage : stages_of(workflow, deployment)) {
    const Resource* res = find_resource(resources, stage.resource);
    if (!res) throw ConfigError(fmt::format("undefined resource '{}'", stage.resource));
    if (res->unbounded) continue;
    auto it = grid.find(stage.name);
    if (it == grid.end()) it = grid.find(stage.component);
    if (it == grid.end() || it->second.empty()) {
      issues.push_back(fmt::format("no parallelism levels for '{}' on bounded resource '{}'",
                                   stage.name, stage.resource));
      continue;
    }
    for (int level : it->second) {
      if (level < 1)
        issues.push_back(fmt::format("'{}': parallelism {} must be >= 1", stage.name, level));
      else if (level > res->capacity())
        throw CapacityError(fmt::format("'{}': parallelism {} exceeds capacity {} of '{}' ({} nodes x {} cores)",
                                        stage.name, level, res->capacity(), res->name,
                                        res->capacity() / res->cores_per_node, res->cores_per_node));
    }
    targets.push_back(stage.name);
    levels.push_back(it->second);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  std::vector<std::size_t> radices;
  for (const auto& l : levels) radices.push_back(l.size());
  std::vector<RunConfiguration> out;
  for_each_combination(radices, [&](const std::vector<std::size_t>& digits) {
    RunConfiguration cfg;
    cfg.deployment = deployment;
    cfg.workload = workload;
    for (std::size_t i = 0; i < digits.size(); ++i) cfg.parallelism[targets[i]] = levels[i][digits[i]];
    out.push_back(std::move(cfg));
  });
  return out;
}

TrainTestConfigurations select_training_configurations(std::span<const RunConfiguration> configs,
                                                       SelectionStrategy strategy) {
  TrainTestConfigurations out;
  if (strategy == SelectionStrategy::all) {
    out.train.assign(configs.begin(), configs.end());
    return out;
  }
  std::map<std::string, std::pair<int, int>> range;
  for (const auto& c : configs)
    for (const auto& [stage, p] : c.parallelism) {
      auto [it, inserted] = range.try_emplace(stage, p, p);
      if (!inserted) {
        it->second.first = std::min(it->second.first, p);
        it->second.second = std::max(it->second.second, p);
      }
    }
  for (const auto& c : configs) {
    const bool extreme = std::all_of(c.parallelism.begin(), c.parallelism.end(), [&](const auto& kv) {
      const auto& [lo, hi] = range.at(kv.first);
      return kv.second == lo || kv.second == hi;
    });
    (extreme ? out.train : out.test).push_back(c);
  }
  return out;
}

}  // namespace faasprof
