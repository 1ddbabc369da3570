#include "sim/types.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "common/error.hpp"

namespace faasprof {

std::string WorkloadSpec::label() const {
  if (mode == WorkloadMode::async_batch) return fmt::format("async-b{}", batch_size);
  return fmt::format("sync-{}{:g}", arrival == ArrivalKind::constant ? "c" : "e", rate);
}

void validate(const ServiceLaw& law, const std::string& owner) {
  std::vector<std::string> issues;
  auto check = [&](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0)
      issues.push_back(fmt::format("law of '{}': {} must be finite and >= 0", owner, field));
  };
  check(law.base, "base");
  check(law.per_core, "per_core");
  check(law.per_file, "per_file");
  check(law.pod_creation, "pod_creation");
  check(law.overhead, "overhead");
  check(law.noise.sigma, "noise sigma");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

void validate(const WorkloadSpec& w) {
  std::vector<std::string> issues;
  if (w.mode == WorkloadMode::async_batch) {
    if (w.batch_size < 1) issues.push_back("workload: batch_size must be a positive integer");
  } else {
    if (!(w.rate > 0.0) || !std::isfinite(w.rate)) issues.push_back("workload: rate must be > 0");
    if (!(w.duration > 0.0) || !std::isfinite(w.duration))
      issues.push_back("workload: duration must be > 0");
    if (!(w.ramp_up >= 0.0) || !(w.ramp_up < w.duration))
      issues.push_back("workload: ramp_up must satisfy 0 <= ramp_up < duration");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace faasprof
