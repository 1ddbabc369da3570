#include "sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/random.hpp"

namespace faasprof {

const StageRun* RunTrace::find_stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.stage.name == name) return &s;
  return nullptr;
}

namespace {

enum class EventKind : int { completion = 0, arrival = 1 };

struct Event {
  double time;
  EventKind kind;
  std::uint64_t seq;
  std::size_t stage;
  std::size_t job;  // index into pending/active job table
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;  // completions first at equal times
    return a.seq > b.seq;
  }
};

struct StageState {
  const ServiceLaw* law = nullptr;
  const Resource* resource = nullptr;
  std::optional<int> cap;
  std::deque<std::size_t> queue;  // job slots, FIFO
  std::set<std::size_t> idle;     // idle pods that already paid their cold start
  std::size_t pods = 0;           // pods created so far
  std::size_t busy = 0;
};

double sample_compute(const ServiceLaw& law, const std::optional<int>& parallelism,
                      const WorkloadSpec& workload, Rng& rng) {
  double t = law.base;
  if (parallelism) t += law.per_core / static_cast<double>(*parallelism);
  if (!workload.is_sync()) t += law.per_file * static_cast<double>(workload.batch_size);
  switch (law.noise.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::normal:
      t *= 1.0 + law.noise.sigma * rng.normal();
      break;
    case NoiseKind::lognormal:
      t *= std::exp(law.noise.sigma * rng.normal());
      break;
  }
  return std::max(t, 0.0);
}

std::vector<double> arrival_times(const WorkloadSpec& w, std::uint64_t seed) {
  std::vector<double> times;
  if (!w.is_sync()) {
    times.assign(static_cast<std::size_t>(w.batch_size), 0.0);
    return times;
  }
  if (w.arrival == ArrivalKind::constant) {
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) / w.rate;
      if (t >= w.duration) break;
      times.push_back(t);
    }
  } else {
    Rng rng(derive_seed(seed, "arrivals"));
    double t = rng.exponential(w.rate);
    while (t < w.duration) {
      times.push_back(t);
      t += rng.exponential(w.rate);
    }
  }
  return times;
}

}  // namespace

RunTrace simulate_run(const WorkflowSpec& workflow, std::span<const Resource> resources,
                      const RunConfiguration& config, const LawMap& laws, std::uint64_t seed,
                      const SimulationOptions& options) {
  validate(config.workload);

  std::vector<Stage> stages = stages_of(workflow, config.deployment);
  if (options.only_component) {
    std::erase_if(stages, [&](const Stage& s) { return s.component != *options.only_component; });
    if (stages.empty())
      throw ConfigError(fmt::format("unknown component '{}'", *options.only_component));
  }

  RunTrace trace;
  trace.workflow = workflow.name;
  trace.seed = seed;
  trace.configuration = config;
  trace.scope = options.only_component.value_or("full");

  std::vector<StageState> state(stages.size());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const Stage& s = stages[i];
    auto law = laws.find(s.name);
    if (law == laws.end()) law = laws.find(s.component);
    if (law == laws.end()) throw ConfigError(fmt::format("no service law for stage '{}'", s.name));
    state[i].law = &law->second;
    state[i].resource = find_resource(resources, s.resource);
    if (!state[i].resource) throw ConfigError(fmt::format("undefined resource '{}'", s.resource));
    if (!state[i].resource->unbounded) {
      state[i].cap = config.parallelism_of(s.name);
      if (!state[i].cap || *state[i].cap < 1)
        throw ConfigError(fmt::format("no parallelism level for stage '{}'", s.name));
    }
    trace.stages.push_back(StageRun{s, state[i].cap, 0.0});
  }

  // Pre-warmed pods on the entry stage.
  if (state[0].cap) {
    const auto warm = static_cast<std::size_t>(
        std::floor(state[0].resource->warm_fraction * static_cast<double>(*state[0].cap)));
    for (std::size_t p = 0; p < warm; ++p) state[0].idle.insert(p);
    state[0].pods = warm;
  }

  Rng service_rng(derive_seed(seed, "service"));
  std::priority_queue<Event, std::vector<Event>, EventLater> events;
  std::uint64_t seq = 0;

  // Job slots: upload time and request id while queued; the record once started.
  std::vector<JobRecord> slots;
  auto new_job = [&](std::size_t stage, std::size_t request, double upload) {
    JobRecord j;
    j.job_id = slots.size();
    j.request_id = request;
    j.stage = stages[stage].name;
    j.component = stages[stage].component;
    j.upload_time = upload;
    slots.push_back(std::move(j));
    events.push(Event{upload, EventKind::arrival, seq++, stage, slots.size() - 1});
  };

  const auto arrivals = arrival_times(config.workload, seed);
  const bool sync = config.workload.is_sync();
  for (std::size_t r = 0; r < arrivals.size(); ++r) new_job(0, r, arrivals[r]);

  auto dispatch = [&](std::size_t si, double now) {
    StageState& st = state[si];
    while (!st.queue.empty()) {
      std::size_t pod;
      bool cold;
      if (!st.idle.empty()) {
        pod = *st.idle.begin();
        st.idle.erase(st.idle.begin());
        cold = false;
      } else if (!st.cap || st.pods < static_cast<std::size_t>(*st.cap)) {
        pod = st.pods++;
        cold = true;
      } else {
        break;
      }
      const std::size_t slot = st.queue.front();
      st.queue.pop_front();
      JobRecord& j = slots[slot];
      j.pod = pod;
      j.start_time = now;
      j.wait = now - j.upload_time;
      if (cold) {
        j.pod_creation = st.law->pod_creation;
        j.overhead = st.law->overhead + st.resource->cold_start_overhead;
      }
      j.compute = sample_compute(*st.law, st.cap, config.workload, service_rng);
      j.end_time = now + j.pod_creation + j.overhead + j.compute;
      ++st.busy;
      events.push(Event{j.end_time, EventKind::completion, seq++, si, slot});
    }
  };

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    StageState& st = state[ev.stage];
    if (ev.kind == EventKind::arrival) {
      if (sync && ev.stage == 0 && st.queue.size() >= options.saturation_cap) {
        trace.saturated = true;
        ++trace.dropped;
        continue;
      }
      if (ev.stage == 0) ++trace.injected;
      st.queue.push_back(ev.job);
    } else {
      const JobRecord j = slots[ev.job];
      --st.busy;
      st.idle.insert(j.pod);
      trace.stages[ev.stage].completion_time = std::max(trace.stages[ev.stage].completion_time, j.end_time);
      trace.jobs.push_back(j);
      if (ev.stage + 1 < stages.size())
        new_job(ev.stage + 1, j.request_id, ev.time + stages[ev.stage].transfer_delay);
    }
    dispatch(ev.stage, ev.time);
  }

  // Renumber so job ids follow completion order and are dense.
  for (std::size_t i = 0; i < trace.jobs.size(); ++i) trace.jobs[i].job_id = i;
  return trace;
}

namespace {

bool matches(const JobRecord& j, const std::string& component) {
  return j.stage == component || j.component == component;
}

bool known_component(const RunTrace& trace, const std::string& component) {
  for (const auto& s : trace.stages)
    if (s.stage.name == component || s.stage.component == component) return true;
  return false;
}

std::string exit_stage(const RunTrace& trace, const std::string& component) {
  std::string last;
  for (const auto& s : trace.stages)
    if (s.stage.name == component || s.stage.component == component) last = s.stage.name;
  if (last.empty()) throw DataError(fmt::format("component '{}' is not part of run '{}'", component, trace.run_id));
  return last;
}

}  // namespace

double makespan(const RunTrace& trace, const std::optional<std::string>& component) {
  if (component && !known_component(trace, *component))
    throw DataError(fmt::format("component '{}' is not part of run '{}'", *component, trace.run_id));
  double first = std::numeric_limits<double>::infinity();
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& j : trace.jobs) {
    if (component && !matches(j, *component)) continue;
    first = std::min(first, j.upload_time);
    last = std::max(last, j.end_time);
  }
  if (!(last >= first)) throw DataError(fmt::format("run '{}' has no jobs to measure", trace.run_id));
  return last - first;
}

double measure_throughput(const RunTrace& trace, const std::string& component) {
  const auto& w = trace.configuration.workload;
  if (!w.is_sync()) throw DataError("throughput is only defined for sync runs");
  const std::string stage = exit_stage(trace, component);
  const double window = w.duration - w.ramp_up;
  std::size_t count = 0;
  for (const auto& j : trace.jobs)
    if (j.stage == stage && j.end_time >= w.ramp_up && j.end_time <= w.duration) ++count;
  if (count == 0 || !(window > 0.0))
    throw DataError(fmt::format("no completions of '{}' inside the measurement window", component));
  return static_cast<double>(count) / window;
}

double mean_response(const RunTrace& trace, const std::optional<std::string>& component) {
  if (component && !known_component(trace, *component))
    throw DataError(fmt::format("component '{}' is not part of run '{}'", *component, trace.run_id));
  std::map<std::size_t, std::pair<double, double>> spans;  // request -> (first upload, last end)
  for (const auto& j : trace.jobs) {
    if (component && !matches(j, *component)) continue;
    auto [it, inserted] = spans.try_emplace(j.request_id, j.upload_time, j.end_time);
    if (!inserted) {
      it->second.first = std::min(it->second.first, j.upload_time);
      it->second.second = std::max(it->second.second, j.end_time);
    }
  }
  const auto& w = trace.configuration.workload;
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& [req, span] : spans) {
    if (w.is_sync() && (span.first < w.ramp_up || span.first >= w.duration)) continue;
    total += span.second - span.first;
    ++n;
  }
  if (n == 0) throw DataError(fmt::format("run '{}' has no jobs to measure", trace.run_id));
  return total / static_cast<double>(n);
}

double mean_job_time(const RunTrace& trace, const std::string& component) {
  if (!known_component(trace, component))
    throw DataError(fmt::format("component '{}' is not part of run '{}'", component, trace.run_id));
  // Partitioned components: one job spans all partitions of a request.
  std::set<std::size_t> requests;
  double total = 0.0;
  for (const auto& j : trace.jobs) {
    if (!matches(j, component)) continue;
    total += j.service();
    requests.insert(j.request_id);
  }
  if (requests.empty()) throw DataError(fmt::format("run '{}' has no jobs of '{}'", trace.run_id, component));
  return total / static_cast<double>(requests.size());
}

}  // namespace faasprof
