#pragma once

#include <string>

namespace faasprof {

enum class NoiseKind { none, normal, lognormal };

// Multiplicative noise on the deterministic duration. sigma is relative:
// normal scales by (1 + sigma Z), lognormal by exp(sigma Z).
struct Noise {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
};

// Ground-truth service time of one job on one stage:
//   compute = base + per_core / parallelism + per_file * batch_size
// with per_core ignored on unbounded resources and per_file only applied to
// async batches.
struct ServiceLaw {
  double base = 0.0;
  double per_core = 0.0;
  double per_file = 0.0;
  Noise noise;
  double pod_creation = 0.0;
  double overhead = 0.0;
};

enum class WorkloadMode { async_batch, sync };
enum class ArrivalKind { constant, exponential };

struct WorkloadSpec {
  WorkloadMode mode = WorkloadMode::async_batch;
  int batch_size = 1;
  ArrivalKind arrival = ArrivalKind::constant;
  double rate = 1.0;       // requests per second
  double duration = 600.0; // seconds of injection
  double ramp_up = 0.0;    // excluded from measurement

  bool is_sync() const noexcept { return mode == WorkloadMode::sync; }
  std::string label() const;
};

// Throws ConfigError when a law or workload violates its invariants.
void validate(const ServiceLaw& law, const std::string& owner);
void validate(const WorkloadSpec& workload);

}  // namespace faasprof
