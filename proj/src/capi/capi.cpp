#include "faasprof/faasprof.h"

#include <cmath>
#include <cstring>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "campaign/campaign.hpp"
#include "campaign/trace_json.hpp"
#include "common/error.hpp"
#include "config/config.hpp"
#include "dataset/dataset.hpp"
#include "eval/model_io.hpp"
#include "predict/predictor.hpp"
#include "report/report.hpp"

struct fp_campaign {
  faasprof::CampaignSpec spec;
};

struct fp_model {
  faasprof::RegressionModel model;
};

struct fp_model_set {
  faasprof::ComponentModelSet set;
};

namespace {

thread_local std::string last_error;

fp_status fail(fp_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
fp_status guarded(F&& f) {
  using namespace faasprof;
  try {
    f();
    last_error.clear();
    return FP_OK;
  } catch (const CapacityError& e) {
    return fail(FP_ERR_CAPACITY, e.what());
  } catch (const ConfigError& e) {
    return fail(FP_ERR_CONFIG, e.what());
  } catch (const DataError& e) {
    return fail(FP_ERR_DATA, e.what());
  } catch (const NumericError& e) {
    return fail(FP_ERR_NUMERIC, e.what());
  } catch (const IoError& e) {
    return fail(FP_ERR_IO, e.what());
  } catch (const VersionError& e) {
    return fail(FP_ERR_VERSION, e.what());
  } catch (const ChecksumError& e) {
    return fail(FP_ERR_CHECKSUM, e.what());
  } catch (const FormatError& e) {
    return fail(FP_ERR_FORMAT, e.what());
  } catch (const StateError& e) {
    return fail(FP_ERR_STATE, e.what());
  } catch (const std::exception& e) {
    return fail(FP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FP_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define FP_REQUIRE(cond, what) \
  if (!(cond)) return fail(FP_ERR_ARGUMENT, what)

std::vector<faasprof::FeatureRow> rows_for(const faasprof::ComponentModelSet& set, const double* cores, size_t n,
                                           const char* key, double value) {
  if (n != set.components.size())
    throw faasprof::DataError(fmt::format("{} cores given for {} components", n, set.components.size()));
  std::vector<faasprof::FeatureRow> rows(n);
  for (size_t k = 0; k < n; ++k) {
    if (!std::isnan(cores[k])) rows[k]["cores"] = cores[k];
    rows[k][key] = value;
  }
  return rows;
}

}  // namespace

extern "C" {

const char* fp_version(void) { return "0.1.0"; }

const char* fp_status_name(fp_status status) {
  switch (status) {
    case FP_OK: return "ok";
    case FP_ERR_ARGUMENT: return "invalid argument";
    case FP_ERR_CONFIG: return "configuration error";
    case FP_ERR_CAPACITY: return "capacity error";
    case FP_ERR_DATA: return "data error";
    case FP_ERR_NUMERIC: return "numeric error";
    case FP_ERR_IO: return "i/o error";
    case FP_ERR_FORMAT: return "format error";
    case FP_ERR_VERSION: return "version error";
    case FP_ERR_CHECKSUM: return "checksum error";
    case FP_ERR_STATE: return "state error";
    case FP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fp_last_error(void) { return last_error.c_str(); }

void fp_string_free(char* s) { std::free(s); }

fp_status fp_campaign_load(const char* path, fp_campaign** out) {
  FP_REQUIRE(path && out, "fp_campaign_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fp_campaign{faasprof::parse_campaign_config(path)}; });
}

void fp_campaign_free(fp_campaign* c) { delete c; }

fp_status fp_campaign_counts(const fp_campaign* c, fp_counts* out) {
  FP_REQUIRE(c && out, "fp_campaign_counts: null argument");
  return guarded([&] {
    const auto e = faasprof::enumerate(c->spec);
    out->testing_units = e.units.size();
    out->deployments = e.deployments.size();
    out->configurations = e.configurations.size();
    out->train_configurations = e.selection.train.size();
    out->test_configurations = e.selection.test.size();
    out->planned_runs = e.selection.train.empty() ? 0 : faasprof::plan_campaign(c->spec).runs.size();
  });
}

fp_status fp_campaign_describe(const fp_campaign* c, char** json_out) {
  FP_REQUIRE(c && json_out, "fp_campaign_describe: null argument");
  return guarded([&] {
    auto j = faasprof::spec_to_json(c->spec);
    j["digest"] = faasprof::spec_digest(c->spec);
    *json_out = dup(j.dump(2));
  });
}

fp_status fp_campaign_list(const fp_campaign* c, int what, char** text_out) {
  FP_REQUIRE(c && text_out, "fp_campaign_list: null argument");
  FP_REQUIRE(what >= 0 && what <= 2, "fp_campaign_list: 'what' must be 0, 1 or 2");
  return guarded([&] {
    const auto e = faasprof::enumerate(c->spec);
    std::string text;
    if (what == 0)
      for (const auto& u : e.units) text += u.label() + "\n";
    else if (what == 1)
      for (const auto& d : e.deployments) text += d.label() + "\n";
    else
      for (const auto& cfg : e.configurations) text += fmt::format("{:04} {}\n", cfg.index, cfg.key());
    *text_out = dup(text);
  });
}

fp_status fp_campaign_run(fp_campaign* c, const fp_run_options* options, fp_run_summary* out) {
  FP_REQUIRE(c, "fp_campaign_run: null campaign");
  return guarded([&] {
    faasprof::ExecuteOptions opt;
    opt.output_dir = c->spec.output_dir;
    if (options) {
      opt.jobs = options->jobs < 1 ? 1 : options->jobs;
      if (options->stop_after >= 0) opt.stop_after = static_cast<std::size_t>(options->stop_after);
      if (options->output_dir) opt.output_dir = options->output_dir;
    }
    const auto plan = faasprof::plan_campaign(c->spec);
    faasprof::SimulatorBackend backend(c->spec);
    const auto r = faasprof::execute_campaign(plan, backend, opt);
    if (out) {
      out->planned = plan.runs.size();
      out->succeeded = r.traces.size();
      out->executed = r.executed.size();
      out->failed = r.failures.size();
      out->complete = r.complete ? 1 : 0;
    }
  });
}

fp_status fp_train(const char* config_path, const fp_train_options* options, char** leaderboard_out) {
  FP_REQUIRE(config_path, "fp_train: null config path");
  return guarded([&] {
    auto cfg = faasprof::parse_training_config(config_path);
    if (options) {
      if (options->input) cfg.input = options->input;
      if (options->output_dir) cfg.output_dir = options->output_dir;
      if (options->jobs >= 1) cfg.jobs = options->jobs;
    }
    if (cfg.input.empty()) throw faasprof::ConfigError("no input dataset: set DataPreparation.input_path");
    const auto d = faasprof::load_dataset(cfg.input, cfg.target);
    if (auto issues = faasprof::column_issues(cfg, d); !issues.empty()) throw faasprof::ConfigError(std::move(issues));
    const auto board = faasprof::run_experiments(cfg, d);
    const auto files = faasprof::write_training_outputs(board, cfg.output_dir);
    if (leaderboard_out) *leaderboard_out = dup(board.text() + fmt::format("model written to {}\n", files.model));
  });
}

fp_status fp_model_load(const char* path, fp_model** out) {
  FP_REQUIRE(path && out, "fp_model_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fp_model{faasprof::load_model(path)}; });
}

void fp_model_free(fp_model* m) { delete m; }

fp_status fp_model_predict(const fp_model* m, const char* const* names, size_t n_names, const double* values,
                           size_t rows, double* out) {
  FP_REQUIRE(m && out, "fp_model_predict: null argument");
  FP_REQUIRE(n_names == 0 || (names && values), "fp_model_predict: null names or values");
  return guarded([&] {
    std::vector<std::string> cols;
    for (size_t i = 0; i < n_names; ++i) cols.emplace_back(names[i]);
    faasprof::Matrix x(rows, n_names);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < n_names; ++c) x(r, c) = values[r * n_names + c];
    const auto d = faasprof::make_dataset(cols, x, "", cols);
    const auto y = m->model.predict_raw(d);
    std::copy(y.begin(), y.end(), out);
  });
}

fp_status fp_model_describe(const fp_model* m, char** json_out) {
  FP_REQUIRE(m && json_out, "fp_model_describe: null argument");
  return guarded([&] {
    const auto& md = m->model;
    nlohmann::json j = {{"algorithm", std::string(faasprof::to_string(md.algorithm))},
                        {"hyperparameters", md.hp.str()},
                        {"features", md.features},
                        {"base_features", md.recipe.recipe.features}};
    j["validation_mape"] = std::isnan(md.validation_mape) ? nlohmann::json(nullptr) : nlohmann::json(md.validation_mape);
    *json_out = dup(j.dump(2));
  });
}

fp_status fp_model_set_load(const char* manifest_path, fp_model_set** out) {
  FP_REQUIRE(manifest_path && out, "fp_model_set_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new fp_model_set{faasprof::ComponentModelSet::load(manifest_path)}; });
}

void fp_model_set_free(fp_model_set* s) { delete s; }

size_t fp_model_set_size(const fp_model_set* s) { return s ? s->set.components.size() : 0; }

fp_status fp_predict_async(const fp_model_set* s, const double* cores, size_t n, int batch_size, double* total_out,
                           double* naive_out) {
  FP_REQUIRE(s && (cores || n == 0) && total_out, "fp_predict_async: null argument");
  FP_REQUIRE(batch_size >= 1, "fp_predict_async: batch_size must be >= 1");
  return guarded([&] {
    const auto p = faasprof::predict_async_rows(s->set, rows_for(s->set, cores, n, "batch_size", batch_size));
    *total_out = p.total;
    if (naive_out) *naive_out = p.naive_sum;
  });
}

fp_status fp_predict_sync(const fp_model_set* s, const double* cores, size_t n, double lambda, int propagate,
                          double* total_out) {
  FP_REQUIRE(s && (cores || n == 0) && total_out, "fp_predict_sync: null argument");
  return guarded([&] {
    const auto p = faasprof::predict_sync_rows(s->set, rows_for(s->set, cores, n, "lambda", lambda), lambda, propagate != 0);
    *total_out = p.total;
  });
}

fp_status fp_predict_sweep(const fp_model_set* s, const char* sweep_csv, const char* out_csv, int propagate) {
  FP_REQUIRE(s && sweep_csv && out_csv, "fp_predict_sweep: null argument");
  return guarded([&] { faasprof::predict_sweep(s->set, sweep_csv, out_csv, propagate != 0); });
}

fp_status fp_report(const char* dir, char** text_out) {
  FP_REQUIRE(dir && text_out, "fp_report: null argument");
  return guarded([&] { *text_out = dup(faasprof::render_report(dir)); });
}

}  // extern "C"
