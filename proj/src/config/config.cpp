#include "config/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/random.hpp"

namespace faasprof {

namespace {

using Keys = std::initializer_list<std::string_view>;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string join_path(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string index_path(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

// Walks a YAML tree and records every problem with its source line.
class Reader {
public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  std::vector<std::string> issues;

  void issue(const YAML::Node& at, const std::string& path, const std::string& msg) {
    const auto mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    if (mark.is_null())
      issues.push_back(fmt::format("{}: {}: {}", origin_, path, msg));
    else
      issues.push_back(fmt::format("{}:{}: {}: {}", origin_, mark.line + 1, path, msg));
  }

  // True when n is a mapping; unknown keys are reported.
  bool mapping(const YAML::Node& n, const std::string& path, Keys allowed) {
    if (!n.IsMap()) {
      issue(n, path, "expected a mapping");
      return false;
    }
    for (const auto& kv : n) {
      const std::string key = kv.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        issue(kv.first, join_path(path, key), "unknown key");
    }
    return true;
  }

  bool sequence(const YAML::Node& n, const std::string& path) {
    if (n.IsSequence()) return true;
    issue(n, path, "expected a list");
    return false;
  }

  std::optional<std::string> text(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) return n.Scalar();
    issue(n, path, "expected a scalar value");
    return std::nullopt;
  }

  std::optional<double> number(const YAML::Node& n, const std::string& path) {
    auto s = text(n, path);
    if (!s) return std::nullopt;
    auto v = csv::parse_number(*s);
    if (!v || !std::isfinite(*v)) {
      issue(n, path, fmt::format("malformed number '{}'", *s));
      return std::nullopt;
    }
    return v;
  }

  template <class Int>
  std::optional<Int> integer(const YAML::Node& n, const std::string& path) {
    auto s = text(n, path);
    if (!s) return std::nullopt;
    Int v{};
    const auto [end, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc{} || end != s->data() + s->size()) {
      issue(n, path, fmt::format("expected an integer, got '{}'", *s));
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const YAML::Node& n, const std::string& path) {
    auto s = text(n, path);
    if (!s) return std::nullopt;
    bool v = false;
    if (YAML::convert<bool>::decode(n, v)) return v;
    issue(n, path, fmt::format("expected true or false, got '{}'", *s));
    return std::nullopt;
  }

  // Optional keyed fields: leave `out` untouched when the key is absent.
  void get(const YAML::Node& m, std::string_view key, const std::string& path, std::string& out) {
    if (auto n = m[std::string(key)]) {
      if (auto v = text(n, join_path(path, key))) out = *v;
    }
  }
  void get(const YAML::Node& m, std::string_view key, const std::string& path, double& out) {
    if (auto n = m[std::string(key)]) {
      if (auto v = number(n, join_path(path, key))) out = *v;
    }
  }
  template <class Int>
    requires std::is_integral_v<Int>
  void get(const YAML::Node& m, std::string_view key, const std::string& path, Int& out) {
    if (auto n = m[std::string(key)]) {
      if (auto v = integer<Int>(n, join_path(path, key))) out = *v;
    }
  }
  void get(const YAML::Node& m, std::string_view key, const std::string& path, bool& out) {
    if (auto n = m[std::string(key)]) {
      if (auto v = boolean(n, join_path(path, key))) out = *v;
    }
  }

  // A scalar is accepted where a one-element list is expected.
  std::vector<std::string> strings(const YAML::Node& n, const std::string& path) {
    std::vector<std::string> out;
    if (n.IsScalar()) return {n.Scalar()};
    if (!sequence(n, path)) return out;
    for (std::size_t i = 0; i < n.size(); ++i)
      if (auto v = text(n[i], index_path(path, i))) out.push_back(*v);
    return out;
  }

  std::vector<int> integers(const YAML::Node& n, const std::string& path) {
    std::vector<int> out;
    if (n.IsScalar()) {
      if (auto v = integer<int>(n, path)) out.push_back(*v);
      return out;
    }
    if (!sequence(n, path)) return out;
    for (std::size_t i = 0; i < n.size(); ++i)
      if (auto v = integer<int>(n[i], index_path(path, i))) out.push_back(*v);
    return out;
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& path) {
    std::vector<double> out;
    if (n.IsScalar()) {
      if (auto v = number(n, path)) out.push_back(*v);
      return out;
    }
    if (!sequence(n, path)) return out;
    for (std::size_t i = 0; i < n.size(); ++i)
      if (auto v = number(n[i], index_path(path, i))) out.push_back(*v);
    return out;
  }

  template <class E>
  void choice(const YAML::Node& m, std::string_view key, const std::string& path,
              std::initializer_list<std::pair<std::string_view, E>> options, E& out) {
    auto n = m[std::string(key)];
    if (!n) return;
    auto s = text(n, join_path(path, key));
    if (!s) return;
    for (const auto& [name, value] : options)
      if (*s == name) {
        out = value;
        return;
      }
    std::vector<std::string_view> names;
    for (const auto& o : options) names.push_back(o.first);
    issue(n, join_path(path, key), fmt::format("'{}' is not one of {}", *s, fmt::join(names, ", ")));
  }

  YAML::Node load(const std::string& text) {
    try {
      return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
      issues.push_back(fmt::format("{}:{}:{}: malformed YAML: {}", origin_, e.mark.line + 1, e.mark.column + 1, e.msg));
      return {};
    }
  }

private:
  std::string origin_;
};

// --- campaign ----------------------------------------------------------------

Resource read_resource(Reader& r, const YAML::Node& n, const std::string& path) {
  Resource res;
  if (!r.mapping(n, path, {"name", "cores_per_node", "node_counts", "unbounded", "cold_start_overhead", "warm_fraction"}))
    return res;
  if (!n["name"]) r.issue(n, path, "missing 'name'");
  r.get(n, "name", path, res.name);
  r.get(n, "cores_per_node", path, res.cores_per_node);
  if (auto nc = n["node_counts"]) res.node_counts = r.integers(nc, join_path(path, "node_counts"));
  r.get(n, "unbounded", path, res.unbounded);
  r.get(n, "cold_start_overhead", path, res.cold_start_overhead);
  r.get(n, "warm_fraction", path, res.warm_fraction);
  return res;
}

Component read_component(Reader& r, const YAML::Node& n, const std::string& path) {
  Component c;
  if (!r.mapping(n, path, {"name", "resources", "partitions"})) return c;
  if (!n["name"]) r.issue(n, path, "missing 'name'");
  r.get(n, "name", path, c.name);
  if (auto res = n["resources"]) c.compatible_resources = r.strings(res, join_path(path, "resources"));
  if (auto parts = n["partitions"]) {
    const std::string ppath = join_path(path, "partitions");
    if (r.sequence(parts, ppath)) {
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string pp = index_path(ppath, i);
        Partition p;
        p.index = static_cast<int>(i) + 1;
        if (!r.mapping(parts[i], pp, {"name", "index", "resources", "transfer_delay"})) continue;
        if (!parts[i]["name"]) r.issue(parts[i], pp, "missing 'name'");
        r.get(parts[i], "name", pp, p.name);
        r.get(parts[i], "index", pp, p.index);
        if (auto res = parts[i]["resources"]) p.compatible_resources = r.strings(res, join_path(pp, "resources"));
        r.get(parts[i], "transfer_delay", pp, p.transfer_delay);
        c.partitions.push_back(std::move(p));
      }
      std::stable_sort(c.partitions.begin(), c.partitions.end(),
                       [](const Partition& a, const Partition& b) { return a.index < b.index; });
    }
  }
  return c;
}

WorkloadSpec read_workload(Reader& r, const YAML::Node& n, const std::string& path) {
  WorkloadSpec w;
  if (!r.mapping(n, path, {"mode", "batch_size", "arrival", "rate", "duration", "ramp_up"})) return w;
  r.choice<WorkloadMode>(n, "mode", path, {{"async", WorkloadMode::async_batch}, {"sync", WorkloadMode::sync}}, w.mode);
  r.get(n, "batch_size", path, w.batch_size);
  r.choice<ArrivalKind>(n, "arrival", path,
                        {{"constant", ArrivalKind::constant}, {"exponential", ArrivalKind::exponential}}, w.arrival);
  r.get(n, "rate", path, w.rate);
  r.get(n, "duration", path, w.duration);
  r.get(n, "ramp_up", path, w.ramp_up);
  return w;
}

ServiceLaw read_law(Reader& r, const YAML::Node& n, const std::string& path) {
  ServiceLaw l;
  if (!r.mapping(n, path, {"base", "per_core", "per_file", "noise", "sigma", "pod_creation", "overhead"})) return l;
  r.get(n, "base", path, l.base);
  r.get(n, "per_core", path, l.per_core);
  r.get(n, "per_file", path, l.per_file);
  r.choice<NoiseKind>(n, "noise", path,
                      {{"none", NoiseKind::none}, {"normal", NoiseKind::normal}, {"lognormal", NoiseKind::lognormal}},
                      l.noise.kind);
  r.get(n, "sigma", path, l.noise.sigma);
  r.get(n, "pod_creation", path, l.pod_creation);
  r.get(n, "overhead", path, l.overhead);
  return l;
}

// --- training ----------------------------------------------------------------

void read_general(Reader& r, const YAML::Node& n, TrainingConfig& cfg, bool& split_seeded) {
  const std::string path = "General";
  if (!r.mapping(n, path,
                 {"seed", "folds", "fold_column", "budget", "jobs", "y", "output_dir", "techniques", "validation", "hold_out_ratio",
                  "split_seed", "column", "values", "threshold", "k"}))
    return;
  r.get(n, "seed", path, cfg.seed);
  r.get(n, "folds", path, cfg.folds);
  r.get(n, "fold_column", path, cfg.fold_column);
  r.get(n, "budget", path, cfg.budget);
  r.get(n, "jobs", path, cfg.jobs);
  r.get(n, "y", path, cfg.target);
  r.get(n, "output_dir", path, cfg.output_dir);
  if (auto t = n["techniques"]) {
    cfg.algorithms.clear();
    const std::string tp = join_path(path, "techniques");
    const auto names = r.strings(t, tp);
    for (const auto& name : names) {
      try {
        const Algorithm a = parse_algorithm(name);
        if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), a) != cfg.algorithms.end())
          r.issue(t, tp, fmt::format("'{}' listed twice", name));
        else
          cfg.algorithms.push_back(a);
      } catch (const Error& e) {
        r.issue(t, tp, e.what());
      }
    }
    if (names.empty()) r.issue(t, tp, "no technique listed");
  }
  auto& s = cfg.split;
  r.choice<SplitKind>(n, "validation", path,
                      {{"none", SplitKind::none},
                       {"holdout", SplitKind::holdout},
                       {"kfold", SplitKind::kfold},
                       {"interpolation", SplitKind::interpolation},
                       {"extrapolation", SplitKind::extrapolation}},
                      s.kind);
  r.get(n, "hold_out_ratio", path, s.fraction);
  r.get(n, "k", path, s.k);
  if (n["split_seed"]) split_seeded = true;
  r.get(n, "split_seed", path, s.seed);
  r.get(n, "column", path, s.column);
  if (auto v = n["values"]) s.values = r.numbers(v, join_path(path, "values"));
  r.get(n, "threshold", path, s.threshold);

  auto need = [&](std::string_view key) {
    if (!n[std::string(key)]) r.issue(n, path, fmt::format("validation '{}' requires '{}'", n["validation"].Scalar(), key));
  };
  if (s.kind == SplitKind::kfold) r.issue(n, join_path(path, "validation"), "kfold is not an outer split; use 'folds' for inner cross-validation");
  if (s.kind == SplitKind::interpolation) {
    need("column");
    need("values");
  }
  if (s.kind == SplitKind::extrapolation) {
    need("column");
    need("threshold");
  }
  if (s.kind == SplitKind::holdout && !(s.fraction >= 0.0 && s.fraction < 1.0))
    r.issue(n["hold_out_ratio"], join_path(path, "hold_out_ratio"), "must lie in [0,1)");
  if (cfg.folds < 2) r.issue(n["folds"], join_path(path, "folds"), "must be >= 2");
  if (cfg.budget < 1) r.issue(n["budget"], join_path(path, "budget"), "must be >= 1");
  if (cfg.jobs < 1) r.issue(n["jobs"], join_path(path, "jobs"), "must be >= 1");
}

void read_preparation(Reader& r, const YAML::Node& n, TrainingConfig& cfg) {
  const std::string path = "DataPreparation";
  if (!r.mapping(n, path,
                 {"input_path", "features", "select_rows", "one_hot", "inverse", "log", "product_max_degree",
                  "normalization"}))
    return;
  auto& recipe = cfg.recipe;
  r.get(n, "input_path", path, cfg.input);
  if (auto f = n["features"]) recipe.features = r.strings(f, join_path(path, "features"));
  if (recipe.features.empty()) r.issue(n, path, "no base features listed");

  if (auto s = n["select_rows"]) {
    const std::string sp = join_path(path, "select_rows");
    for (const auto& text : r.strings(s, sp)) {
      try {
        Transform t;
        t.kind = TransformKind::select_rows;
        t.predicate = RowPredicate::parse(text);
        recipe.transforms.push_back(std::move(t));
      } catch (const ConfigError& e) {
        r.issue(s, sp, e.what());
      }
    }
  }
  auto per_column = [&](std::string_view key, TransformKind kind) {
    if (auto c = n[std::string(key)])
      for (const auto& col : r.strings(c, join_path(path, key))) {
        Transform t;
        t.kind = kind;
        t.column = col;
        recipe.transforms.push_back(std::move(t));
      }
  };
  per_column("one_hot", TransformKind::one_hot);
  per_column("inverse", TransformKind::inverse);
  per_column("log", TransformKind::log);
  if (auto d = n["product_max_degree"]) {
    if (auto v = r.integer<int>(d, join_path(path, "product_max_degree"))) {
      if (*v < 1)
        r.issue(d, join_path(path, "product_max_degree"), "must be >= 1");
      else if (*v > 1) {
        Transform t;
        t.kind = TransformKind::polynomial;
        t.degree = *v;
        recipe.transforms.push_back(t);
      }
    }
  }
  bool normalize = false;
  r.get(n, "normalization", path, normalize);
  if (normalize) {
    Transform t;
    t.kind = TransformKind::normalize;
    t.column = "*";
    recipe.transforms.push_back(t);
  }
}

void read_selection(Reader& r, const YAML::Node& n, TrainingConfig& cfg) {
  const std::string path = "FeatureSelection";
  if (!r.mapping(n, path, {"sfs", "max_features"})) return;
  r.get(n, "sfs", path, cfg.sfs);
  r.get(n, "max_features", path, cfg.max_features);
}

void read_priors(Reader& r, const YAML::Node& n, Algorithm a, TrainingConfig& cfg) {
  const std::string path(to_string(a));
  if (!n.IsMap()) {
    r.issue(n, path, "expected a mapping");
    return;
  }
  PriorSet priors = default_priors(a);
  const auto& known = known_hyperparameters(a);
  for (const auto& kv : n) {
    const std::string key = kv.first.Scalar();
    const std::string kp = join_path(path, key);
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      r.issue(kv.first, kp, "unknown hyperparameter");
      continue;
    }
    auto s = r.text(kv.second, kp);
    if (!s) continue;
    try {
      Prior p = Prior::parse(*s);
      p.validate(key);
      auto it = std::find_if(priors.begin(), priors.end(), [&](const auto& e) { return e.first == key; });
      if (it == priors.end())
        priors.emplace_back(key, p);
      else
        it->second = p;
    } catch (const ConfigError& e) {
      r.issue(kv.second, kp, e.what());
    }
  }
  cfg.priors[a] = std::move(priors);
}

}  // namespace

CampaignSpec parse_campaign_yaml(const std::string& text, const std::string& origin) {
  Reader r(origin);
  CampaignSpec spec;
  const YAML::Node root = r.load(text);
  if (!r.issues.empty()) throw ConfigError(r.issues);
  if (!r.mapping(root, "campaign",
                 {"name", "seed", "repetitions", "selection", "single_component", "saturation_cap", "output_dir",
                  "resources", "workflow", "parallelism", "workloads", "laws"}))
    throw ConfigError(r.issues);

  r.get(root, "name", "", spec.name);
  r.get(root, "seed", "", spec.seed);
  r.get(root, "repetitions", "", spec.repetitions);
  r.choice<SelectionStrategy>(root, "selection", "",
                              {{"all", SelectionStrategy::all}, {"extremes", SelectionStrategy::extremes}},
                              spec.selection);
  r.get(root, "single_component", "", spec.single_component);
  r.get(root, "saturation_cap", "", spec.saturation_cap);
  r.get(root, "output_dir", "", spec.output_dir);

  if (auto res = root["resources"]; !res)
    r.issue(root, "resources", "missing");
  else if (r.sequence(res, "resources"))
    for (std::size_t i = 0; i < res.size(); ++i)
      spec.resources.push_back(read_resource(r, res[i], index_path("resources", i)));

  if (auto wf = root["workflow"]; !wf)
    r.issue(root, "workflow", "missing");
  else if (r.mapping(wf, "workflow", {"name", "components"})) {
    r.get(wf, "name", "workflow", spec.workflow.name);
    if (spec.workflow.name.empty()) spec.workflow.name = spec.name;
    if (auto comps = wf["components"]; !comps)
      r.issue(wf, "workflow.components", "missing");
    else if (r.sequence(comps, "workflow.components"))
      for (std::size_t i = 0; i < comps.size(); ++i)
        spec.workflow.components.push_back(read_component(r, comps[i], index_path("workflow.components", i)));
  }

  if (auto grid = root["parallelism"]) {
    if (!grid.IsMap())
      r.issue(grid, "parallelism", "expected a mapping of component to levels");
    else
      for (const auto& kv : grid) {
        const std::string key = kv.first.Scalar();
        auto levels = r.integers(kv.second, join_path("parallelism", key));
        std::sort(levels.begin(), levels.end());
        if (std::adjacent_find(levels.begin(), levels.end()) != levels.end())
          r.issue(kv.second, join_path("parallelism", key), "duplicate parallelism level");
        spec.grid[key] = std::move(levels);
      }
  }

  if (auto w = root["workloads"]) {
    spec.workloads.clear();
    if (w.IsMap())
      spec.workloads.push_back(read_workload(r, w, "workloads"));
    else if (r.sequence(w, "workloads"))
      for (std::size_t i = 0; i < w.size(); ++i) spec.workloads.push_back(read_workload(r, w[i], index_path("workloads", i)));
  }

  if (auto laws = root["laws"]; !laws)
    r.issue(root, "laws", "missing");
  else if (laws.IsMap())
    for (const auto& kv : laws) {
      const std::string key = kv.first.Scalar();
      spec.laws[key] = read_law(r, kv.second, join_path("laws", key));
    }
  else
    r.issue(laws, "laws", "expected a mapping");

  std::vector<std::string> issues = std::move(r.issues);
  auto semantic = spec.validation_issues();
  issues.insert(issues.end(), semantic.begin(), semantic.end());
  if (spec.saturation_cap < 1) issues.push_back("saturation_cap must be >= 1");
  if (issues.empty()) {
    try {
      (void)enumerate(spec);
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return spec;
}

CampaignSpec parse_campaign_config(const std::string& path) { return parse_campaign_yaml(read_text(path), path); }

TrainingConfig parse_training_yaml(const std::string& text, const std::string& origin) {
  Reader r(origin);
  TrainingConfig cfg;
  const YAML::Node root = r.load(text);
  if (!r.issues.empty()) throw ConfigError(r.issues);
  if (!r.mapping(root, "training",
                 {"General", "DataPreparation", "FeatureSelection", "ridge", "decision_tree", "random_forest",
                  "gradient_boosting"}))
    throw ConfigError(r.issues);

  bool split_seeded = false;
  if (auto g = root["General"]) read_general(r, g, cfg, split_seeded);
  if (!split_seeded) cfg.split.seed = derive_seed(cfg.seed, "split");
  if (auto d = root["DataPreparation"])
    read_preparation(r, d, cfg);
  else
    r.issue(root, "DataPreparation", "missing");
  if (auto f = root["FeatureSelection"]) read_selection(r, f, cfg);
  for (Algorithm a : kAllAlgorithms)
    if (auto p = root[std::string(to_string(a))]) read_priors(r, p, a, cfg);

  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return cfg;
}

TrainingConfig parse_training_config(const std::string& path) { return parse_training_yaml(read_text(path), path); }

std::vector<std::string> column_issues(const TrainingConfig& cfg, const Dataset& d) {
  std::vector<std::string> issues;
  std::set<std::string> reported;
  auto need = [&](const std::string& col, std::string_view role) {
    if (col.empty() || col == "*" || d.has(col) || !reported.insert(col).second) return;
    issues.push_back(fmt::format("{} column '{}' not found in '{}'", role, col, d.provenance));
  };
  need(cfg.target, "target");
  for (const auto& f : cfg.recipe.features) need(f, "feature");
  for (const auto& t : cfg.recipe.transforms) {
    if (t.kind == TransformKind::select_rows)
      need(t.predicate.column, "select_rows");
    else if (t.kind != TransformKind::polynomial && t.kind != TransformKind::normalize)
      need(t.column, "transform");
  }
  if (cfg.split.kind == SplitKind::interpolation || cfg.split.kind == SplitKind::extrapolation)
    need(cfg.split.column, "split");
  if (cfg.fold_column != "auto" && cfg.fold_column != "none") need(cfg.fold_column, "fold");
  return issues;
}

}  // namespace faasprof
