// Command-line driver. Talks to the library only through the C API.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faasprof/faasprof.h"

namespace {

int report_failure(fp_status s) {
  std::fprintf(stderr, "faasprof: %s: %s\n", fp_status_name(s), fp_last_error());
  return 1;
}

struct CString {
  char* p = nullptr;
  ~CString() { fp_string_free(p); }
};

// --output beats FAASPROF_OUTPUT_DIR, which beats the config file.
const char* output_dir(const std::string& flag) {
  if (!flag.empty()) return flag.c_str();
  const char* env = std::getenv("FAASPROF_OUTPUT_DIR");
  return env && *env ? env : nullptr;
}

double parse_cores(const std::string& s) {
  if (s == "-" || s == "lambda" || s == "none") return std::nan("");
  return std::stod(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profile serverless workflows on a simulated backend and model their performance"};
  app.name("faasprof");
  app.set_version_flag("--version", fp_version());
  app.require_subcommand(1);

  std::string campaign_path, train_path, manifest, report_dir, out_flag, input_flag, list;
  int jobs = 0;
  long stop_after = -1;

  auto* enumerate = app.add_subcommand("enumerate", "Count testing units, deployments and configurations");
  enumerate->add_option("config", campaign_path, "Campaign YAML")->required();
  enumerate->add_option("--list", list, "Also print units, deployments or configurations")
      ->check(CLI::IsMember({"units", "deployments", "configurations"}));
  bool describe = false;
  enumerate->add_flag("--describe", describe, "Print the parsed spec as JSON");

  auto* campaign = app.add_subcommand("campaign", "Run (or resume) a profiling campaign");
  campaign->add_option("config", campaign_path, "Campaign YAML")->required();
  campaign->add_option("-o,--output", out_flag, "Output directory");
  campaign->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  campaign->add_option("--stop-after", stop_after, "Stop after this many runs")->check(CLI::NonNegativeNumber);

  auto* train = app.add_subcommand("train", "Train and select performance models");
  train->add_option("config", train_path, "Training YAML")->required();
  train->add_option("-i,--input", input_flag, "Dataset CSV");
  train->add_option("-o,--output", out_flag, "Output directory");
  train->add_option("-j,--jobs", jobs, "Parallel experiments")->check(CLI::PositiveNumber);

  auto* predict = app.add_subcommand("predict", "Predict full-workflow performance");
  predict->add_option("manifest", manifest, "Model manifest JSON")->required();
  std::string sweep, sweep_out, cores_list;
  int batch_size = 0;
  double lambda = 0.0;
  bool no_propagate = false;
  predict->add_option("--sweep", sweep, "CSV of configurations to predict");
  predict->add_option("--out", sweep_out, "Where to write sweep predictions")->needs(predict->get_option("--sweep"));
  predict->add_option("--cores", cores_list, "Comma-separated cores per component ('-' for unbounded)");
  predict->add_option("--batch-size", batch_size, "Async batch size")->check(CLI::PositiveNumber);
  predict->add_option("--lambda", lambda, "Sync arrival rate")->check(CLI::PositiveNumber);
  predict->add_flag("--no-propagate", no_propagate, "Feed every component the input rate");

  auto* report = app.add_subcommand("report", "Summarise a campaign or training output directory");
  report->add_option("dir", report_dir, "Output directory")->required()->check(CLI::ExistingDirectory);

  if (argc > 1 && argv[1][0] != '-') {
    const std::string cmd = argv[1];
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == cmd;
    if (!known) {
      std::fprintf(stderr, "faasprof: unknown command '%s'\n\n%s", cmd.c_str(), app.help().c_str());
      return 2;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "faasprof: %s\n\n%s", e.what(), app.help().c_str());
    return 2;
  }

  if (*enumerate || *campaign) {
    fp_campaign* raw = nullptr;
    if (fp_status s = fp_campaign_load(campaign_path.c_str(), &raw)) return report_failure(s);
    std::unique_ptr<fp_campaign, decltype(&fp_campaign_free)> c(raw, fp_campaign_free);

    if (*enumerate) {
      fp_counts n{};
      if (fp_status s = fp_campaign_counts(c.get(), &n)) return report_failure(s);
      std::printf("%zu testing units, %zu deployments, %zu configurations\n", n.testing_units, n.deployments,
                  n.configurations);
      std::printf("training selection: %zu configurations (%zu held out), %zu planned runs\n",
                  n.train_configurations, n.test_configurations, n.planned_runs);
      if (!list.empty()) {
        const int what = list == "units" ? 0 : list == "deployments" ? 1 : 2;
        CString text;
        if (fp_status s = fp_campaign_list(c.get(), what, &text.p)) return report_failure(s);
        std::fputs(text.p, stdout);
      }
      if (describe) {
        CString json;
        if (fp_status s = fp_campaign_describe(c.get(), &json.p)) return report_failure(s);
        std::printf("%s\n", json.p);
      }
      return 0;
    }

    fp_run_options opt{jobs, stop_after, output_dir(out_flag)};
    fp_run_summary sum{};
    if (fp_status s = fp_campaign_run(c.get(), &opt, &sum)) return report_failure(s);
    std::printf("%zu planned runs: %zu executed now, %zu succeeded, %zu failed\n", sum.planned, sum.executed,
                sum.succeeded, sum.failed);
    if (!sum.complete) std::printf("campaign incomplete; run the same command again to resume\n");
    return 0;
  }

  if (*train) {
    fp_train_options opt{input_flag.empty() ? nullptr : input_flag.c_str(), output_dir(out_flag), jobs};
    CString text;
    if (fp_status s = fp_train(train_path.c_str(), &opt, &text.p)) return report_failure(s);
    std::fputs(text.p, stdout);
    return 0;
  }

  if (*predict) {
    if (sweep.empty() && (cores_list.empty() || (batch_size == 0) == (lambda == 0.0))) {
      std::fprintf(stderr, "faasprof: predict needs --sweep, or --cores with exactly one of --batch-size/--lambda\n\n%s",
                   predict->help().c_str());
      return 2;
    }
    fp_model_set* raw = nullptr;
    if (fp_status s = fp_model_set_load(manifest.c_str(), &raw)) return report_failure(s);
    std::unique_ptr<fp_model_set, decltype(&fp_model_set_free)> set(raw, fp_model_set_free);
    if (!sweep.empty()) {
      const std::string out = sweep_out.empty() ? sweep + ".pred.csv" : sweep_out;
      if (fp_status s = fp_predict_sweep(set.get(), sweep.c_str(), out.c_str(), !no_propagate))
        return report_failure(s);
      std::printf("predictions written to %s\n", out.c_str());
      return 0;
    }
    std::vector<double> cores;
    try {
      for (const auto& part : CLI::detail::split(cores_list, ',')) cores.push_back(parse_cores(CLI::detail::trim_copy(part)));
    } catch (const std::exception&) {
      std::fprintf(stderr, "faasprof: malformed --cores list '%s'\n", cores_list.c_str());
      return 2;
    }
    double total = 0.0, naive = 0.0;
    if (batch_size > 0) {
      if (fp_status s = fp_predict_async(set.get(), cores.data(), cores.size(), batch_size, &total, &naive))
        return report_failure(s);
      std::printf("predicted runtime %.6f s (uncorrected sum %.6f s)\n", total, naive);
    } else {
      if (fp_status s = fp_predict_sync(set.get(), cores.data(), cores.size(), lambda, !no_propagate, &total))
        return report_failure(s);
      std::printf("predicted response time %.6f s per request\n", total);
    }
    return 0;
  }

  CString text;
  if (fp_status s = fp_report(report_dir.c_str(), &text.p)) return report_failure(s);
  std::fputs(text.p, stdout);
  return 0;
}
