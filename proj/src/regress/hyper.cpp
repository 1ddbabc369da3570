#include "regress/hyper.hpp"

#include <cmath>
#include <regex>

#include <fmt/format.h>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace faasprof {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ridge: return "ridge";
    case Algorithm::decision_tree: return "decision_tree";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::gradient_boosting: return "gradient_boosting";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

double Hyperparameters::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw ConfigError(fmt::format("{}: missing hyperparameter '{}'", to_string(algorithm), name));
  return it->second;
}

double Hyperparameters::get_or(const std::string& name, double fallback) const {
  auto it = values.find(name);
  return it == values.end() ? fallback : it->second;
}

std::string Hyperparameters::str() const {
  std::string s;
  for (const auto& [k, v] : values) s += fmt::format("{}{}={:.6g}", s.empty() ? "" : ";", k, v);
  for (const auto& [k, v] : labels) s += fmt::format("{}{}={}", s.empty() ? "" : ";", k, v);
  return s;
}

Prior Prior::loguniform(double a, double b) {
  Prior p;
  p.kind = Kind::loguniform;
  p.a = a;
  p.b = b;
  return p;
}

Prior Prior::quniform(double a, double b, double q) {
  Prior p;
  p.kind = Kind::quniform;
  p.a = a;
  p.b = b;
  p.q = q;
  return p;
}

Prior Prior::constant(double v) {
  Prior p;
  p.value = v;
  return p;
}

Prior Prior::constant_label(std::string s) {
  Prior p;
  p.label = std::move(s);
  return p;
}

Prior Prior::parse(const std::string& text) {
  static const std::regex call(R"(^\s*(loguniform|quniform)\s*\(([^)]*)\)\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, call)) {
    std::vector<double> args;
    for (const auto& part : csv::split_line(m[2].str())) {
      auto v = csv::parse_number(part);
      if (!v) throw ConfigError(fmt::format("malformed number '{}' in prior '{}'", part, text));
      args.push_back(*v);
    }
    if (m[1] == "loguniform") {
      if (args.size() != 2) throw ConfigError(fmt::format("loguniform takes 2 arguments: '{}'", text));
      return loguniform(args[0], args[1]);
    }
    if (args.size() != 3) throw ConfigError(fmt::format("quniform takes 3 arguments: '{}'", text));
    return quniform(args[0], args[1], args[2]);
  }
  if (auto v = csv::parse_number(text)) return constant(*v);
  if (text.empty()) throw ConfigError("empty prior");
  return constant_label(text);
}

bool Prior::contains(double x) const {
  switch (kind) {
    case Kind::loguniform: return x >= a && x <= b;
    case Kind::quniform: {
      if (x < a || x > b) return false;
      const double k = x / q;
      return std::abs(k - std::round(k)) < 1e-9;
    }
    case Kind::constant: return label.empty() && x == value;
  }
  return false;
}

std::string Prior::str() const {
  switch (kind) {
    case Kind::loguniform: return fmt::format("loguniform({:g},{:g})", a, b);
    case Kind::quniform: return fmt::format("quniform({:g},{:g},{:g})", a, b, q);
    case Kind::constant: return label.empty() ? fmt::format("{:g}", value) : label;
  }
  return {};
}

void Prior::validate(const std::string& name) const {
  if (kind == Kind::constant) return;
  if (!(a < b)) throw ConfigError(fmt::format("prior for '{}': lower bound {:g} must be below upper bound {:g}", name, a, b));
  if (kind == Kind::loguniform && !(a > 0.0))
    throw ConfigError(fmt::format("prior for '{}': loguniform needs a positive lower bound", name));
  if (kind == Kind::quniform && !(q > 0.0))
    throw ConfigError(fmt::format("prior for '{}': quniform step must be positive", name));
}

PriorSet default_priors(Algorithm a) {
  switch (a) {
    case Algorithm::ridge:
      return {{"alpha", Prior::loguniform(0.01, 1)}, {"fit_intercept", Prior::constant(1)}};
    case Algorithm::decision_tree:
      return {{"criterion", Prior::constant_label("mse")},
              {"max_depth", Prior::constant(3)},
              {"max_features", Prior::constant_label("auto")},
              {"min_samples_split", Prior::loguniform(0.01, 1)},
              {"min_samples_leaf", Prior::loguniform(0.01, 0.5)}};
    case Algorithm::random_forest:
      return {{"n_estimators", Prior::constant(5)},
              {"criterion", Prior::constant_label("mse")},
              {"max_depth", Prior::quniform(3, 6, 1)},
              {"max_features", Prior::constant_label("auto")},
              {"min_samples_split", Prior::loguniform(0.1, 1)},
              {"min_samples_leaf", Prior::constant(1)}};
    case Algorithm::gradient_boosting:
      return {{"min_child_weight", Prior::constant(1)},
              {"gamma", Prior::loguniform(0.1, 10)},
              {"n_estimators", Prior::constant(1000)},
              {"learning_rate", Prior::loguniform(0.01, 1)},
              {"max_depth", Prior::constant(100)}};
  }
  return {};
}

const std::vector<std::string>& known_hyperparameters(Algorithm a) {
  static const std::vector<std::string> ridge{"alpha", "fit_intercept"};
  static const std::vector<std::string> tree{"criterion", "max_depth", "max_features", "min_samples_split",
                                             "min_samples_leaf"};
  static const std::vector<std::string> forest{"n_estimators", "criterion", "max_depth", "max_features",
                                               "min_samples_split", "min_samples_leaf"};
  static const std::vector<std::string> boost{"min_child_weight", "gamma", "n_estimators", "learning_rate",
                                              "max_depth", "early_stop"};
  switch (a) {
    case Algorithm::ridge: return ridge;
    case Algorithm::decision_tree: return tree;
    case Algorithm::random_forest: return forest;
    case Algorithm::gradient_boosting: return boost;
  }
  return ridge;
}

}  // namespace faasprof
