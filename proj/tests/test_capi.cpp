// Exercises the shared library through its C interface and the CLI binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "faasprof/faasprof.h"

namespace fs = std::filesystem;

namespace {

std::string source(const char* rel) { return std::string(FAASPROF_SOURCE_DIR) + "/" + rel; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("faasprof_api_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Output {
  int status = -1;
  std::string text;  // stdout and stderr
};

Output cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + FAASPROF_CLI + "' " + args + " 2>&1";
  Output o;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (size_t n = std::fread(buf, 1, sizeof buf, p)) o.text.append(buf, n);
  const int raw = pclose(p);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

// Simulated scaling campaign shared by the training tests.
const fs::path& scaling_runs() {
  static const fs::path dir = [] {
    const auto d = scratch("scaling");
    const auto o = cli("campaign '" + source("configs/scaling.yaml") + "' -o '" + d.string() + "'");
    REQUIRE(o.status == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(fp_version()) == "0.1.0");
  CHECK(std::string(fp_status_name(FP_ERR_CAPACITY)) == "capacity error");
  CHECK(std::string(fp_status_name(static_cast<fp_status>(99))) == "unknown status");
}

TEST_CASE("campaign handle counts, lists and describes") {
  fp_campaign* c = nullptr;
  REQUIRE(fp_campaign_load(source("configs/partitioned_component.yaml").c_str(), &c) == FP_OK);
  CHECK(std::string(fp_last_error()).empty());
  fp_counts n{};
  REQUIRE(fp_campaign_counts(c, &n) == FP_OK);
  CHECK(n.testing_units == 3);
  CHECK(n.deployments == 3);
  CHECK(n.configurations == 8);

  char* text = nullptr;
  REQUIRE(fp_campaign_list(c, 0, &text) == FP_OK);
  CHECK(std::string(text) == "c1@rpi\nc1@vm\nc1.1@rpi+c1.2@vm\n");
  fp_string_free(text);
  CHECK(fp_campaign_list(c, 7, &text) == FP_ERR_ARGUMENT);
  char* json = nullptr;
  REQUIRE(fp_campaign_describe(c, &json) == FP_OK);
  CHECK(has(json, "\"digest\""));
  fp_string_free(json);
  fp_campaign_free(c);
}

TEST_CASE("errors map to status codes with a message") {
  fp_campaign* c = nullptr;
  CHECK(fp_campaign_load(nullptr, &c) == FP_ERR_ARGUMENT);
  CHECK(has(fp_last_error(), "null"));
  CHECK(fp_campaign_load("/nonexistent.yaml", &c) == FP_ERR_IO);
  CHECK(c == nullptr);
  const auto dir = scratch("errors");
  std::ofstream(dir / "bad.yaml") << "name: x\nbogus: 1\n";
  CHECK(fp_campaign_load((dir / "bad.yaml").c_str(), &c) == FP_ERR_CONFIG);
  CHECK(has(fp_last_error(), "bogus"));
  fp_model* m = nullptr;
  std::ofstream(dir / "junk.fpm") << "not a model";
  CHECK(fp_model_load((dir / "junk.fpm").c_str(), &m) == FP_ERR_FORMAT);
  fp_model_set* s = nullptr;
  CHECK(fp_model_set_load((dir / "none.json").c_str(), &s) == FP_ERR_IO);
  CHECK(fp_model_set_size(nullptr) == 0);
}

TEST_CASE("campaign run stops and resumes through the C API") {
  const auto dir = scratch("run");
  fp_campaign* c = nullptr;
  REQUIRE(fp_campaign_load(source("configs/sync_chain.yaml").c_str(), &c) == FP_OK);
  fp_run_options opt{2, 5, dir.c_str()};
  fp_run_summary sum{};
  REQUIRE(fp_campaign_run(c, &opt, &sum) == FP_OK);
  CHECK(sum.executed == 5);
  CHECK(sum.complete == 0);
  opt.stop_after = -1;
  REQUIRE(fp_campaign_run(c, &opt, &sum) == FP_OK);
  CHECK(sum.complete == 1);
  CHECK(sum.succeeded == sum.planned);
  CHECK(sum.executed == sum.planned - 5);
  CHECK(fs::exists(dir / "runs.csv"));
  fp_campaign_free(c);

  char* text = nullptr;
  REQUIRE(fp_report(dir.c_str(), &text) == FP_OK);
  CHECK(has(text, "completed"));
  fp_string_free(text);
  CHECK(fs::exists(dir / "summary.csv"));
}

TEST_CASE("training writes a loadable model") {
  const auto out = scratch("train");
  const std::string input = (scaling_runs() / "runs.csv").string();
  fp_train_options opt{input.c_str(), out.c_str(), 2};
  char* board = nullptr;
  REQUIRE(fp_train(source("configs/train_runtime.yaml").c_str(), &opt, &board) == FP_OK);
  CHECK(has(board, "model written to"));
  fp_string_free(board);

  fp_model* m = nullptr;
  REQUIRE(fp_model_load((out / "model.fpm").c_str(), &m) == FP_OK);
  const char* names[] = {"cores"};
  const double values[] = {8.0, 16.0};
  double y[2] = {0, 0};
  REQUIRE(fp_model_predict(m, names, 1, values, 2, y) == FP_OK);
  CHECK(std::isfinite(y[0]));
  CHECK(y[0] > y[1]);
  const char* wrong[] = {"memory"};
  CHECK(fp_model_predict(m, wrong, 1, values, 2, y) == FP_ERR_DATA);
  char* json = nullptr;
  REQUIRE(fp_model_describe(m, &json) == FP_OK);
  CHECK(has(json, "\"algorithm\""));
  fp_string_free(json);
  fp_model_free(m);
}

TEST_CASE("cli enumerate and usage errors") {
  const auto e = cli("enumerate '" + source("configs/partitioned_component.yaml") + "'");
  CHECK(e.status == 0);
  CHECK(has(e.text, "3 testing units, 3 deployments"));

  const auto unknown = cli("frobnicate");
  CHECK(unknown.status == 2);
  CHECK(has(unknown.text, "unknown command 'frobnicate'"));
  CHECK(cli("").status == 2);
  CHECK(cli("enumerate").status == 2);
  CHECK(cli("--help").status == 0);

  const auto missing = cli("enumerate /nonexistent.yaml");
  CHECK(missing.status == 1);
  CHECK(has(missing.text, "i/o error"));
}

TEST_CASE("cli training is reproducible") {
  const std::string input = (scaling_runs() / "runs.csv").string();
  const auto a = scratch("train_a");
  const auto b = scratch("train_b");
  const std::string cfg = "'" + source("configs/train_runtime.yaml") + "' -i '" + input + "'";
  REQUIRE(cli("train " + cfg + " -o '" + a.string() + "'").status == 0);
  REQUIRE(cli("train " + cfg + " -o '" + b.string() + "' -j 4").status == 0);
  CHECK(slurp(a / "leaderboard.csv") == slurp(b / "leaderboard.csv"));
  CHECK(slurp(a / "model.fpm") == slurp(b / "model.fpm"));
}

TEST_CASE("cli predict names a missing model file") {
  const auto dir = scratch("predict");
  std::ofstream(dir / "models.json") << R"({"workflow":"w","components":[{"name":"a","runtime":"gone.fpm"}]})";
  const auto o = cli("predict '" + (dir / "models.json").string() + "' --cores 4 --batch-size 8");
  CHECK(o.status == 1);
  CHECK(has(o.text, "gone.fpm"));
  CHECK(cli("predict '" + (dir / "models.json").string() + "' --cores 4").status == 2);
}

TEST_CASE("cli output directory precedence") {
  const auto env_dir = scratch("env");
  const auto flag_dir = scratch("flag");
  const std::string cfg = "'" + source("configs/partitioned_component.yaml") + "'";
  const std::string env = "FAASPROF_OUTPUT_DIR='" + env_dir.string() + "'";
  REQUIRE(cli("campaign " + cfg, env).status == 0);
  CHECK(fs::exists(env_dir / "runs.csv"));
  REQUIRE(cli("campaign " + cfg + " -o '" + flag_dir.string() + "'", env).status == 0);
  CHECK(fs::exists(flag_dir / "runs.csv"));
}
