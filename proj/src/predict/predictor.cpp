#include "predict/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "eval/model_io.hpp"

namespace faasprof {

namespace fs = std::filesystem;

double predict_component(const RegressionModel& m, const FeatureRow& row) {
  const auto& needed = m.recipe.fitted ? m.recipe.recipe.features : m.features;
  std::vector<std::string> names;
  Matrix values(1, needed.size());
  for (std::size_t i = 0; i < needed.size(); ++i) {
    auto it = row.find(needed[i]);
    if (it == row.end() || std::isnan(it->second)) throw DataError(fmt::format("missing feature '{}'", needed[i]));
    names.push_back(needed[i]);
    values(0, i) = it->second;
  }
  const Dataset d = make_dataset(names, values, "", needed);
  return m.predict_raw(d).at(0);
}

ComponentModelSet ComponentModelSet::load(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw IoError(fmt::format("cannot open model manifest '{}'", manifest_path));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", manifest_path, e.what()));
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  ComponentModelSet set;
  try {
    set.workflow = j.value("workflow", "");
    for (const auto& c : j.at("components")) {
      ComponentModels m;
      m.name = c.at("name").get<std::string>();
      auto load_one = [&](const char* key, std::optional<RegressionModel>& slot) {
        if (!c.contains(key)) return;
        const fs::path p = base / c.at(key).get<std::string>();
        slot = load_model(p.string());
      };
      load_one("runtime", m.runtime);
      load_one("job_time", m.job_time);
      load_one("time", m.time);
      load_one("throughput", m.throughput);
      set.components.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed model manifest '{}': {}", manifest_path, e.what()));
  }
  if (set.components.empty()) throw FormatError(fmt::format("model manifest '{}' lists no components", manifest_path));
  return set;
}

FeatureRow features_for(const RunConfiguration& config, const std::string& component) {
  FeatureRow row;
  for (const auto& u : config.deployment.units) {
    if (u.component != component) continue;
    for (const auto& a : u.assignments)
      if (auto p = config.parallelism_of(a.target)) {
        row["cores"] = *p;
        break;
      }
  }
  const auto& w = config.workload;
  if (w.is_sync())
    row["lambda"] = w.rate;
  else
    row["batch_size"] = w.batch_size;
  return row;
}

namespace {

std::string name_of(std::span<const std::string> names, std::size_t k) {
  return k < names.size() ? names[k] : fmt::format("component {}", k + 1);
}

}  // namespace

AsyncPrediction combine_async(std::span<const double> runtimes, std::span<const double> job_times,
                              std::span<const std::string> names) {
  if (runtimes.empty()) throw DataError("no component runtimes");
  if (job_times.size() + 1 < runtimes.size())
    throw DataError(fmt::format("{} components need {} single-job times", runtimes.size(), runtimes.size() - 1));
  AsyncPrediction p;
  double longest = 0.0;
  for (std::size_t k = 0; k < runtimes.size(); ++k) {
    if (!(runtimes[k] >= 0.0))
      throw NumericError(fmt::format("runtime model of '{}' predicted {}", name_of(names, k), runtimes[k]));
    p.runtimes.push_back(runtimes[k]);
    p.naive_sum += runtimes[k];
    longest = std::max(longest, runtimes[k]);
  }
  p.total = p.naive_sum;
  for (std::size_t k = 1; k < runtimes.size(); ++k) {
    const double t = job_times[k - 1];
    if (!(t >= 0.0)) throw NumericError(fmt::format("job-time model of '{}' predicted {}", name_of(names, k - 1), t));
    p.job_times.push_back(t);
    p.total -= t;
  }
  p.total = std::max(p.total, longest);
  return p;
}

SyncPrediction chain_sync(double lambda, std::span<const RateFn> times, std::span<const RateFn> throughputs,
                          bool propagate, std::span<const std::string> names) {
  if (!(lambda > 0.0)) throw DataError(fmt::format("arrival rate must be positive, got {}", lambda));
  if (times.empty()) throw DataError("no component time models");
  SyncPrediction p;
  double rate = lambda;
  for (std::size_t k = 0; k < times.size(); ++k) {
    p.rates.push_back(rate);
    const double t = times[k](rate);
    if (!(t >= 0.0)) throw NumericError(fmt::format("time model of '{}' predicted {}", name_of(names, k), t));
    p.times.push_back(t);
    p.total += t;
    if (propagate && k + 1 < times.size()) {
      if (k >= throughputs.size() || !throughputs[k])
        throw DataError(fmt::format("no throughput model for '{}'", name_of(names, k)));
      const double out = throughputs[k](rate);
      if (!(out > 0.0))
        throw NumericError(fmt::format("throughput model of '{}' predicted {}", name_of(names, k), out));
      rate = std::min(rate, out);
    }
  }
  return p;
}

AsyncPrediction predict_async_rows(const ComponentModelSet& models, const std::vector<FeatureRow>& rows) {
  if (rows.size() != models.components.size())
    throw DataError(fmt::format("{} feature rows for {} components", rows.size(), models.components.size()));
  std::vector<double> r, t;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& c = models.components[k];
    names.push_back(c.name);
    if (!c.runtime) throw DataError(fmt::format("no runtime model for '{}'", c.name));
    r.push_back(predict_component(*c.runtime, rows[k]));
    if (k + 1 < rows.size()) {
      if (!c.job_time) throw DataError(fmt::format("no job-time model for '{}'", c.name));
      t.push_back(predict_component(*c.job_time, rows[k]));
    }
  }
  return combine_async(r, t, names);
}

SyncPrediction predict_sync_rows(const ComponentModelSet& models, const std::vector<FeatureRow>& rows, double lambda,
                                 bool propagate) {
  if (rows.size() != models.components.size())
    throw DataError(fmt::format("{} feature rows for {} components", rows.size(), models.components.size()));
  std::vector<RateFn> times, outs;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& c = models.components[k];
    names.push_back(c.name);
    if (!c.time) throw DataError(fmt::format("no time model for '{}'", c.name));
    auto with_rate = [row = rows[k]](const RegressionModel& m) {
      return [row, &m](double rate) {
        FeatureRow r = row;
        r["lambda"] = rate;
        return predict_component(m, r);
      };
    };
    times.push_back(with_rate(*c.time));
    outs.push_back(c.throughput ? with_rate(*c.throughput) : RateFn{});
  }
  return chain_sync(lambda, times, outs, propagate, names);
}

AsyncPrediction predict_async_workflow(const ComponentModelSet& models, const RunConfiguration& config,
                                       int batch_size) {
  std::vector<FeatureRow> rows;
  for (const auto& c : models.components) {
    auto row = features_for(config, c.name);
    row.erase("lambda");
    row["batch_size"] = batch_size;
    rows.push_back(std::move(row));
  }
  return predict_async_rows(models, rows);
}

SyncPrediction predict_sync_workflow(const ComponentModelSet& models, const RunConfiguration& config, double lambda,
                                     bool propagate) {
  std::vector<FeatureRow> rows;
  for (const auto& c : models.components) {
    auto row = features_for(config, c.name);
    row.erase("batch_size");
    rows.push_back(std::move(row));
  }
  return predict_sync_rows(models, rows, lambda, propagate);
}

void predict_sweep(const ComponentModelSet& models, const std::string& sweep_csv, const std::string& out_csv,
                   bool propagate) {
  const csv::Table in = csv::read_file(sweep_csv);
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(in.header.begin(), in.header.end(), name);
    if (it == in.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - in.header.begin());
  };
  const bool sync = models.components.front().time.has_value();
  const auto rate_col = col(sync ? "lambda" : "batch_size");
  if (!rate_col) throw DataError(fmt::format("sweep file '{}' has no '{}' column", sweep_csv, sync ? "lambda" : "batch_size"));

  csv::Row header = in.header;
  for (const auto& c : models.components) {
    header.push_back(c.name + "_s");
    if (sync) header.push_back(c.name + "_lambda");
  }
  if (!sync) header.push_back("naive_s");
  header.push_back("total_s");

  std::vector<csv::Row> out;
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const auto& fields = in.rows[r];
    if (fields.size() != in.header.size())
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", sweep_csv, in.line_numbers[r],
                                  in.header.size(), fields.size()));
    auto number = [&](std::size_t c) {
      if (fields[c].empty()) return std::numeric_limits<double>::quiet_NaN();
      auto v = csv::parse_number(fields[c]);
      if (!v)
        throw DataError(fmt::format("{}:{}: column '{}' is not numeric: '{}'", sweep_csv, in.line_numbers[r],
                                    in.header[c], fields[c]));
      return *v;
    };
    const double rate = number(*rate_col);
    std::vector<FeatureRow> rows;
    for (const auto& c : models.components) {
      FeatureRow fr;
      if (auto cc = col(c.name)) {
        const double cores = number(*cc);
        if (!std::isnan(cores)) fr["cores"] = cores;
      }
      fr[sync ? "lambda" : "batch_size"] = rate;
      rows.push_back(std::move(fr));
    }
    csv::Row line = fields;
    if (sync) {
      const auto p = predict_sync_rows(models, rows, rate, propagate);
      for (std::size_t k = 0; k < p.times.size(); ++k) {
        line.push_back(csv::format_number(p.times[k]));
        line.push_back(csv::format_number(p.rates[k]));
      }
      line.push_back(csv::format_number(p.total));
    } else {
      const auto p = predict_async_rows(models, rows);
      for (double v : p.runtimes) line.push_back(csv::format_number(v));
      line.push_back(csv::format_number(p.naive_sum));
      line.push_back(csv::format_number(p.total));
    }
    out.push_back(std::move(line));
  }
  csv::write_file(out_csv, header, out);
}

}  // namespace faasprof
