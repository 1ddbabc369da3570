#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regress/model.hpp"
#include "workflow/workflow.hpp"

namespace faasprof {

// Raw input columns for one component: cores, batch_size, lambda.
using FeatureRow = std::map<std::string, double>;

// Applies the model's stored recipe to one row and predicts. A feature the
// model needs that is absent (or NaN) raises DataError naming it.
double predict_component(const RegressionModel& m, const FeatureRow& row);

struct ComponentModels {
  std::string name;
  std::optional<RegressionModel> runtime;     // async: component runtime for a batch
  std::optional<RegressionModel> job_time;    // async: mean single-job time
  std::optional<RegressionModel> time;        // sync: mean response time T(lambda_in, cores)
  std::optional<RegressionModel> throughput;  // sync: lambda_out(lambda_in, cores)
};

struct ComponentModelSet {
  std::string workflow;
  std::vector<ComponentModels> components;  // chain order

  // JSON manifest naming model files relative to the manifest's directory.
  static ComponentModelSet load(const std::string& manifest_path);
};

// Feature row of a component under a configuration: cores is the parallelism
// of the component's first bounded stage.
FeatureRow features_for(const RunConfiguration& config, const std::string& component);

struct AsyncPrediction {
  double total = 0.0;
  double naive_sum = 0.0;
  std::vector<double> runtimes;
  std::vector<double> job_times;
};

// total = sum R_k - sum_{k>=2} tbar_{k-1}, at least max R_k. Throws
// NumericError on a negative input, naming the component.
AsyncPrediction combine_async(std::span<const double> runtimes, std::span<const double> job_times,
                              std::span<const std::string> names = {});

struct SyncPrediction {
  double total = 0.0;
  std::vector<double> rates;  // rates[k] = arrival rate seen by component k
  std::vector<double> times;
};

using RateFn = std::function<double(double)>;

// Response time chain. With propagate, lambda_k = min(lambda_{k-1},
// out_k(lambda_{k-1})); without it every component sees the input rate.
SyncPrediction chain_sync(double lambda, std::span<const RateFn> times, std::span<const RateFn> throughputs,
                          bool propagate = true, std::span<const std::string> names = {});

AsyncPrediction predict_async_rows(const ComponentModelSet& models, const std::vector<FeatureRow>& rows);
SyncPrediction predict_sync_rows(const ComponentModelSet& models, const std::vector<FeatureRow>& rows, double lambda,
                                 bool propagate = true);

AsyncPrediction predict_async_workflow(const ComponentModelSet& models, const RunConfiguration& config,
                                       int batch_size);
SyncPrediction predict_sync_workflow(const ComponentModelSet& models, const RunConfiguration& config, double lambda,
                                     bool propagate = true);

// Reads a sweep CSV (one column per component holding its cores, plus
// batch_size or lambda) and writes one prediction row per input row.
void predict_sweep(const ComponentModelSet& models, const std::string& sweep_csv, const std::string& out_csv,
                   bool propagate = true);

}  // namespace faasprof
