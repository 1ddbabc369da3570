#include "campaign/trace_json.hpp"

#include <fmt/format.h>

#include "common/error.hpp"

namespace faasprof {

using nlohmann::json;

namespace {

const char* mode_name(WorkloadMode m) { return m == WorkloadMode::sync ? "sync" : "async"; }
const char* arrival_name(ArrivalKind a) { return a == ArrivalKind::exponential ? "exponential" : "constant"; }
const char* noise_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::normal: return "normal";
    case NoiseKind::lognormal: return "lognormal";
  }
  return "none";
}

json workload_to_json(const WorkloadSpec& w) {
  return {{"mode", mode_name(w.mode)}, {"batch_size", w.batch_size}, {"arrival", arrival_name(w.arrival)},
          {"rate", w.rate},           {"duration", w.duration},     {"ramp_up", w.ramp_up}};
}

WorkloadSpec workload_from_json(const json& j) {
  WorkloadSpec w;
  w.mode = j.at("mode").get<std::string>() == "sync" ? WorkloadMode::sync : WorkloadMode::async_batch;
  w.batch_size = j.at("batch_size").get<int>();
  w.arrival = j.at("arrival").get<std::string>() == "exponential" ? ArrivalKind::exponential : ArrivalKind::constant;
  w.rate = j.at("rate").get<double>();
  w.duration = j.at("duration").get<double>();
  w.ramp_up = j.at("ramp_up").get<double>();
  return w;
}

json stage_to_json(const Stage& s) {
  return {{"name", s.name},
          {"component", s.component},
          {"resource", s.resource},
          {"transfer_delay", s.transfer_delay},
          {"last_of_component", s.last_of_component}};
}

Stage stage_from_json(const json& j) {
  Stage s;
  s.name = j.at("name").get<std::string>();
  s.component = j.at("component").get<std::string>();
  s.resource = j.at("resource").get<std::string>();
  s.transfer_delay = j.at("transfer_delay").get<double>();
  s.last_of_component = j.at("last_of_component").get<bool>();
  return s;
}

}  // namespace

json configuration_to_json(const RunConfiguration& c) {
  json units = json::array();
  for (const auto& u : c.deployment.units) {
    json as = json::array();
    for (const auto& a : u.assignments) as.push_back({{"target", a.target}, {"resource", a.resource}});
    units.push_back({{"component", u.component}, {"partitioned", u.partitioned}, {"assignments", as}});
  }
  return {{"index", c.index},
          {"units", units},
          {"parallelism", c.parallelism},
          {"workload", workload_to_json(c.workload)}};
}

RunConfiguration configuration_from_json(const json& j) {
  RunConfiguration c;
  c.index = j.at("index").get<std::size_t>();
  for (const auto& u : j.at("units")) {
    TestingUnit t;
    t.component = u.at("component").get<std::string>();
    t.partitioned = u.at("partitioned").get<bool>();
    for (const auto& a : u.at("assignments"))
      t.assignments.push_back({a.at("target").get<std::string>(), a.at("resource").get<std::string>()});
    c.deployment.units.push_back(std::move(t));
  }
  c.parallelism = j.at("parallelism").get<ParallelismMap>();
  c.workload = workload_from_json(j.at("workload"));
  return c;
}

json trace_to_json(const RunTrace& t) {
  json stages = json::array();
  for (const auto& s : t.stages) {
    json js = stage_to_json(s.stage);
    js["parallelism"] = s.parallelism ? json(*s.parallelism) : json(nullptr);
    js["completion_time"] = s.completion_time;
    stages.push_back(js);
  }
  json jobs = json::array();
  for (const auto& j : t.jobs)
    jobs.push_back({j.job_id, j.request_id, j.stage, j.component, j.wait, j.pod_creation, j.overhead, j.compute,
                    j.upload_time, j.start_time, j.end_time, j.pod});
  return {{"run_id", t.run_id},
          {"workflow", t.workflow},
          {"scope", t.scope},
          {"rep", t.rep},
          {"seed", t.seed},
          {"configuration", configuration_to_json(t.configuration)},
          {"stages", stages},
          {"job_fields",
           {"job_id", "request_id", "stage", "component", "wait", "pod_creation", "overhead", "compute", "upload_time",
            "start_time", "end_time", "pod"}},
          {"jobs", jobs},
          {"injected", t.injected},
          {"dropped", t.dropped},
          {"saturated", t.saturated}};
}

RunTrace trace_from_json(const json& j) {
  try {
    RunTrace t;
    t.run_id = j.at("run_id").get<std::string>();
    t.workflow = j.at("workflow").get<std::string>();
    t.scope = j.at("scope").get<std::string>();
    t.rep = j.at("rep").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.configuration = configuration_from_json(j.at("configuration"));
    for (const auto& s : j.at("stages")) {
      StageRun r;
      r.stage = stage_from_json(s);
      if (!s.at("parallelism").is_null()) r.parallelism = s.at("parallelism").get<int>();
      r.completion_time = s.at("completion_time").get<double>();
      t.stages.push_back(std::move(r));
    }
    for (const auto& a : j.at("jobs")) {
      JobRecord r;
      r.job_id = a.at(0).get<std::size_t>();
      r.request_id = a.at(1).get<std::size_t>();
      r.stage = a.at(2).get<std::string>();
      r.component = a.at(3).get<std::string>();
      r.wait = a.at(4).get<double>();
      r.pod_creation = a.at(5).get<double>();
      r.overhead = a.at(6).get<double>();
      r.compute = a.at(7).get<double>();
      r.upload_time = a.at(8).get<double>();
      r.start_time = a.at(9).get<double>();
      r.end_time = a.at(10).get<double>();
      r.pod = a.at(11).get<std::size_t>();
      t.jobs.push_back(std::move(r));
    }
    t.injected = j.at("injected").get<std::size_t>();
    t.dropped = j.at("dropped").get<std::size_t>();
    t.saturated = j.at("saturated").get<bool>();
    return t;
  } catch (const json::exception& e) {
    throw StateError(fmt::format("malformed trace: {}", e.what()));
  }
}

json spec_to_json(const CampaignSpec& spec) {
  json resources = json::array();
  for (const auto& r : spec.resources)
    resources.push_back({{"name", r.name},
                         {"cores_per_node", r.cores_per_node},
                         {"node_counts", r.node_counts},
                         {"unbounded", r.unbounded},
                         {"cold_start_overhead", r.cold_start_overhead},
                         {"warm_fraction", r.warm_fraction}});
  json components = json::array();
  for (const auto& c : spec.workflow.components) {
    json parts = json::array();
    for (const auto& p : c.partitions)
      parts.push_back({{"name", p.name},
                       {"index", p.index},
                       {"resources", p.compatible_resources},
                       {"transfer_delay", p.transfer_delay}});
    components.push_back({{"name", c.name}, {"resources", c.compatible_resources}, {"partitions", parts}});
  }
  json laws = json::object();
  for (const auto& [name, l] : spec.laws)
    laws[name] = {{"base", l.base},
                  {"per_core", l.per_core},
                  {"per_file", l.per_file},
                  {"noise", noise_name(l.noise.kind)},
                  {"sigma", l.noise.sigma},
                  {"pod_creation", l.pod_creation},
                  {"overhead", l.overhead}};
  json workloads = json::array();
  for (const auto& w : spec.workloads) workloads.push_back(workload_to_json(w));
  return {{"name", spec.name},
          {"workflow", {{"name", spec.workflow.name}, {"components", components}}},
          {"resources", resources},
          {"parallelism", spec.grid},
          {"workloads", workloads},
          {"laws", laws},
          {"repetitions", spec.repetitions},
          {"selection", spec.selection == SelectionStrategy::all ? "all" : "extremes"},
          {"single_component", spec.single_component},
          {"seed", spec.seed},
          {"saturation_cap", spec.saturation_cap},
          {"output_dir", spec.output_dir}};
}

}  // namespace faasprof
