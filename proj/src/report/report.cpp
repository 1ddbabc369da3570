#include "report/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "eval/model_io.hpp"

namespace faasprof {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write '{}'", p.string()));
  f << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open '{}'", p.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string campaign_state(const fs::path& p) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(p));
  } catch (const nlohmann::json::exception& e) {
    throw StateError(fmt::format("'{}' is not valid JSON: {}", p.string(), e.what()));
  }
  const auto count = [&](const char* key) { return j.contains(key) ? j[key].size() : std::size_t{0}; };
  return fmt::format("campaign '{}' (digest {}): {} completed, {} pending, {} failed\n",
                     j.value("workflow", ""), j.value("digest", ""), count("completed"), count("pending"),
                     count("failed"));
}

struct Group {
  csv::Row key;
  std::vector<double> runtimes;
  std::vector<double> throughputs;
};

std::string run_summary(const fs::path& runs_csv, const fs::path& summary_csv) {
  const csv::Table t = csv::read_file(runs_csv.string());
  auto idx = [&](const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
      if (t.header[i] == name) return i;
    throw DataError(fmt::format("'{}' has no '{}' column", runs_csv.string(), name));
  };
  const std::size_t run_id = idx("run_id");
  const std::vector<std::size_t> keys{idx("scope"), idx("component"), idx("resource"),
                                      idx("cores"), idx("batch_size"), idx("lambda")};
  const std::size_t runtime = idx("runtime_s"), throughput = idx("throughput_rps");

  std::vector<Group> groups;
  std::map<csv::Row, std::size_t> where;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) continue;
    // run ids are c<config>-<scope>-r<rep>; repetitions share the prefix
    csv::Row key{row[run_id].substr(0, row[run_id].find('-'))};
    for (std::size_t k : keys) key.push_back(row[k]);
    auto [it, fresh] = where.try_emplace(key, groups.size());
    if (fresh) groups.push_back({key, {}, {}});
    Group& g = groups[it->second];
    if (auto v = csv::parse_number(row[runtime])) g.runtimes.push_back(*v);
    if (auto v = csv::parse_number(row[throughput])) g.throughputs.push_back(*v);
  }

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto sd = [&](const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? std::nan("") : 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  std::vector<csv::Row> out;
  std::string text = fmt::format("{} run rows, {} distinct settings\n", t.rows.size(), groups.size());
  text += fmt::format("{:<6} {:<16} {:<20} {:<12} {:>6} {:>6} {:>9} {:>5} {:>12} {:>10}\n", "config", "scope",
                      "component", "resource", "cores", "batch", "lambda", "runs", "runtime_s", "sd");
  for (const auto& g : groups) {
    csv::Row r = g.key;
    r.push_back(std::to_string(g.runtimes.size()));
    r.push_back(csv::format_number(mean(g.runtimes)));
    r.push_back(csv::format_number(sd(g.runtimes)));
    r.push_back(csv::format_number(mean(g.throughputs)));
    text += fmt::format("{:<6} {:<16} {:<20} {:<12} {:>6} {:>6} {:>9} {:>5} {:>12} {:>10}\n", g.key[0], g.key[1],
                        g.key[2], g.key[3], g.key[4], g.key[5], g.key[6], g.runtimes.size(), r[8], r[9]);
    out.push_back(std::move(r));
  }
  csv::write_file(summary_csv.string(),
                  {"config", "scope", "component", "resource", "cores", "batch_size", "lambda", "runs", "mean_runtime_s",
                   "sd_runtime_s", "mean_throughput_rps"},
                  out);
  text += fmt::format("summary written to {}\n", summary_csv.string());
  return text;
}

}  // namespace

TrainingOutputs write_training_outputs(const Leaderboard& board, const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));
  TrainingOutputs o;
  o.leaderboard_csv = (out / "leaderboard.csv").string();
  o.leaderboard_txt = (out / "leaderboard.txt").string();
  o.model = (out / "model.fpm").string();
  write_text(o.leaderboard_csv, board.csv());
  write_text(o.leaderboard_txt, board.text());
  save_model(board.best().model, o.model);
  return o;
}

std::string render_report(const std::string& dir) {
  const fs::path d(dir);
  if (!fs::is_directory(d)) throw IoError(fmt::format("'{}' is not a directory", dir));
  std::string text;
  if (fs::exists(d / "state.json")) text += campaign_state(d / "state.json");
  if (fs::exists(d / "failures.txt")) {
    const std::string f = read_text(d / "failures.txt");
    const auto n = static_cast<std::size_t>(std::count(f.begin(), f.end(), '\n'));
    if (n) text += fmt::format("{} failed runs listed in {}\n", n, (d / "failures.txt").string());
  }
  if (fs::exists(d / "runs.csv")) text += run_summary(d / "runs.csv", d / "summary.csv");
  if (fs::exists(d / "leaderboard.txt")) text += read_text(d / "leaderboard.txt");
  if (text.empty()) throw IoError(fmt::format("'{}' holds no campaign or training output", dir));
  return text;
}

}  // namespace faasprof
