#include "campaign/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "campaign/trace_json.hpp"
#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/random.hpp"
#include "dataset/dataset.hpp"

namespace faasprof {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> CampaignSpec::validation_issues() const {
  std::vector<std::string> issues = faasprof::validation_issues(workflow, resources);
  if (repetitions < 1) issues.push_back(fmt::format("repetitions must be >= 1, got {}", repetitions));
  if (workloads.empty()) issues.push_back("no workload defined");
  for (const auto& w : workloads) {
    try {
      validate(w);
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  std::set<std::string> names;
  for (const auto& c : workflow.components) {
    names.insert(c.name);
    for (const auto& p : c.partitions) names.insert(p.name);
  }
  for (const auto& c : workflow.components) {
    bool covered = laws.contains(c.name);
    if (!c.partitions.empty())
      covered = covered || std::all_of(c.partitions.begin(), c.partitions.end(),
                                       [&](const Partition& p) { return laws.contains(p.name); });
    if (!covered) issues.push_back(fmt::format("no service law for component '{}'", c.name));
  }
  for (const auto& [name, law] : laws) {
    if (!names.contains(name)) issues.push_back(fmt::format("service law for unknown component '{}'", name));
    try {
      validate(law, name);
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  for (const auto& [name, levels] : grid)
    if (!names.contains(name)) issues.push_back(fmt::format("parallelism grid for unknown component '{}'", name));
  return issues;
}

Enumeration enumerate(const CampaignSpec& spec) {
  if (auto issues = spec.validation_issues(); !issues.empty()) throw ConfigError(std::move(issues));
  Enumeration e;
  e.units = enumerate_testing_units(spec.workflow, spec.resources);
  e.deployments = enumerate_deployments(spec.workflow, e.units);
  for (const auto& d : e.deployments)
    for (const auto& w : spec.workloads)
      for (auto& c : expand_configurations(spec.workflow, d, spec.grid, spec.resources, w)) {
        c.index = e.configurations.size();
        e.configurations.push_back(std::move(c));
      }
  e.selection = select_training_configurations(e.configurations, spec.selection);
  return e;
}

std::string spec_digest(const CampaignSpec& spec) {
  json j = spec_to_json(spec);
  j.erase("output_dir");
  return fmt::format("{:016x}", fnv1a(j.dump()));
}

CampaignPlan plan_campaign(const CampaignSpec& spec) {
  const Enumeration e = enumerate(spec);
  if (e.selection.train.empty()) throw ConfigError("campaign selects no configurations");
  CampaignPlan plan;
  plan.workflow = spec.workflow.name;
  plan.digest = spec_digest(spec);
  std::vector<std::string> scopes{"full"};
  // with one component an isolated run repeats the full run
  if (spec.single_component && spec.workflow.components.size() > 1)
    for (const auto& c : spec.workflow.components) scopes.push_back(c.name);
  for (const auto& config : e.selection.train)
    for (const auto& scope : scopes)
      for (int rep = 1; rep <= spec.repetitions; ++rep) {
        PlannedRun r;
        r.run_id = fmt::format("c{:04}-{}-r{}", config.index, scope, rep);
        r.scope = scope;
        r.rep = rep;
        r.seed = derive_seed(spec.seed, r.run_id);
        r.configuration = config;
        plan.runs.push_back(std::move(r));
      }
  return plan;
}

RunTrace SimulatorBackend::run(const PlannedRun& r) {
  SimulationOptions opt;
  opt.saturation_cap = spec_.saturation_cap;
  if (r.scope != "full") opt.only_component = r.scope;
  RunTrace t = simulate_run(spec_.workflow, spec_.resources, r.configuration, spec_.laws, r.seed, opt);
  t.run_id = r.run_id;
  t.rep = r.rep;
  return t;
}

namespace {

void write_json_atomic(const fs::path& path, const json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    f << j.dump(1) << '\n';
    if (!f) throw IoError(fmt::format("error writing '{}'", tmp.string()));
  }
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw StateError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace

CampaignResult execute_campaign(const CampaignPlan& plan, Backend& backend, const ExecuteOptions& options) {
  const fs::path out = options.output_dir;
  const fs::path traces_dir = out / "traces";
  const fs::path state_path = out / "state.json";
  std::error_code ec;
  fs::create_directories(traces_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", traces_dir.string(), ec.message()));

  std::set<std::string> ids;
  for (const auto& r : plan.runs)
    if (!ids.insert(r.run_id).second) throw StateError(fmt::format("duplicate run id '{}' in plan", r.run_id));

  std::set<std::string> completed;
  std::map<std::string, std::string> failed;
  if (fs::exists(state_path)) {
    const json st = read_json(state_path);
    try {
      if (st.at("digest").get<std::string>() != plan.digest)
        throw StateError(fmt::format("'{}' belongs to a different campaign (digest {} vs {}); use a fresh output "
                                     "directory",
                                     state_path.string(), st.at("digest").get<std::string>(), plan.digest));
      for (const auto& id : st.at("completed")) completed.insert(id.get<std::string>());
      for (const auto& [id, why] : st.at("failed").items()) failed[id] = why.get<std::string>();
    } catch (const json::exception& e) {
      throw StateError(fmt::format("malformed state file '{}': {}", state_path.string(), e.what()));
    }
    for (const auto& id : completed)
      if (!ids.contains(id)) throw StateError(fmt::format("state lists run '{}' that is not in the plan", id));
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < plan.runs.size(); ++i)
    if (!completed.contains(plan.runs[i].run_id) && !failed.contains(plan.runs[i].run_id)) pending.push_back(i);

  CampaignResult result;
  std::mutex mu;
  auto checkpoint = [&] {
    json st;
    st["version"] = 1;
    st["workflow"] = plan.workflow;
    st["digest"] = plan.digest;
    json done = json::array(), todo = json::array(), bad = json::object();
    for (const auto& r : plan.runs) {
      if (completed.contains(r.run_id))
        done.push_back(r.run_id);
      else if (failed.contains(r.run_id))
        bad[r.run_id] = failed[r.run_id];
      else
        todo.push_back(r.run_id);
    }
    st["completed"] = done;
    st["pending"] = todo;
    st["failed"] = bad;
    write_json_atomic(state_path, st);
  };
  checkpoint();

  const std::size_t limit = options.stop_after ? std::min(*options.stop_after, pending.size()) : pending.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  auto worker = [&] {
    for (std::size_t k = next++; k < limit; k = next++) {
      const PlannedRun& r = plan.runs[pending[k]];
      std::string error;
      try {
        RunTrace t = backend.run(r);
        write_json_atomic(traces_dir / (r.run_id + ".json"), trace_to_json(t));
      } catch (const IoError&) {
        std::lock_guard lock(mu);
        if (!fatal) fatal = std::current_exception();
        return;
      } catch (const std::exception& e) {
        error = e.what();
      }
      std::lock_guard lock(mu);
      if (error.empty())
        completed.insert(r.run_id);
      else
        failed[r.run_id] = error;
      result.executed.push_back(r.run_id);
      checkpoint();
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, options.jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n_threads, limit); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  for (const auto& r : plan.runs) {
    if (completed.contains(r.run_id))
      result.traces.push_back(trace_from_json(read_json(traces_dir / (r.run_id + ".json"))));
    else if (auto it = failed.find(r.run_id); it != failed.end())
      result.failures.push_back({r.run_id, it->second});
  }
  result.complete = completed.size() + failed.size() == plan.runs.size();
  if (result.complete) {
    write_job_csv(result.traces, (out / "jobs.csv").string());
    write_run_csv(result.traces, (out / "runs.csv").string());
    std::ofstream f(out / "failures.txt", std::ios::trunc);
    for (const auto& [id, why] : result.failures) f << id << '\t' << why << '\n';
    if (!f) throw IoError(fmt::format("cannot write '{}'", (out / "failures.txt").string()));
  }
  return result;
}

namespace {

std::string fmt_int(std::optional<int> v) { return v ? std::to_string(*v) : ""; }

void check_one_workflow(const std::vector<RunTrace>& traces) {
  for (const auto& t : traces)
    if (t.workflow != traces.front().workflow)
      throw DataError(fmt::format("traces mix workflows '{}' and '{}'", traces.front().workflow, t.workflow));
}

std::string batch_cell(const WorkloadSpec& w) { return w.is_sync() ? "" : std::to_string(w.batch_size); }
std::string lambda_cell(const WorkloadSpec& w) { return w.is_sync() ? csv::format_number(w.rate) : ""; }

}  // namespace

void write_job_csv(const std::vector<RunTrace>& traces, const std::string& path) {
  check_one_workflow(traces);
  std::vector<csv::Row> rows;
  for (const auto& t : traces) {
    const auto& w = t.configuration.workload;
    for (const auto& j : t.jobs) {
      const StageRun* s = t.find_stage(j.stage);
      rows.push_back({t.run_id, j.stage, s ? s->stage.resource : "", fmt_int(s ? s->parallelism : std::nullopt),
                      batch_cell(w), lambda_cell(w), std::to_string(t.rep), csv::format_number(j.wait),
                      csv::format_number(j.pod_creation), csv::format_number(j.overhead),
                      csv::format_number(j.compute), csv::format_number(j.response())});
    }
  }
  csv::write_file(path, job_csv_header(), rows);
}

void write_run_csv(const std::vector<RunTrace>& traces, const std::string& path) {
  check_one_workflow(traces);
  std::vector<csv::Row> rows;
  for (const auto& t : traces) {
    const auto& w = t.configuration.workload;
    auto row = [&](const std::string& component, const std::string& resource, std::optional<int> cores,
                   std::optional<std::string> measure) {
      std::size_t jobs = 0;
      for (const auto& j : t.jobs)
        if (!measure || j.stage == *measure || j.component == *measure) ++jobs;
      auto guarded = [](auto f) -> std::string {
        try {
          return csv::format_number(f());
        } catch (const DataError&) {
          return "";
        }
      };
      const std::string runtime = guarded([&] { return makespan(t, measure); });
      const std::string job_time = measure ? guarded([&] { return mean_job_time(t, *measure); }) : "";
      const std::string response = guarded([&] { return mean_response(t, measure); });
      std::string throughput;
      if (w.is_sync())
        throughput = guarded([&] { return measure_throughput(t, measure ? *measure : t.stages.back().stage.component); });
      rows.push_back({t.run_id, t.scope, component, resource, fmt_int(cores), batch_cell(w), lambda_cell(w),
                      std::to_string(t.rep), std::to_string(jobs), runtime, job_time, response, throughput,
                      t.saturated ? "1" : "0"});
    };
    std::map<std::string, std::vector<const StageRun*>> by_component;
    std::vector<std::string> order;
    for (const auto& s : t.stages) {
      row(s.stage.name, s.stage.resource, s.parallelism, s.stage.name);
      if (!by_component.contains(s.stage.component)) order.push_back(s.stage.component);
      by_component[s.stage.component].push_back(&s);
    }
    for (const auto& c : order) {
      const auto& parts = by_component[c];
      if (parts.size() < 2 && parts.front()->stage.name == c) continue;
      std::vector<std::string> res;
      for (const auto* p : parts) res.push_back(p->stage.resource);
      row(c, fmt::format("{}", fmt::join(res, "+")), std::nullopt, c);
    }
    if (t.scope == "full" && t.stages.size() > 1) row("workflow", "", std::nullopt, std::nullopt);
  }
  csv::write_file(path, run_csv_header(), rows);
}

}  // namespace faasprof
