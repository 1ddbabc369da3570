#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace faasprof {

enum class Algorithm { ridge, decision_tree, random_forest, gradient_boosting };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::ridge, Algorithm::decision_tree,
                                               Algorithm::random_forest, Algorithm::gradient_boosting};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct Hyperparameters {
  Algorithm algorithm = Algorithm::ridge;
  std::map<std::string, double> values;
  std::map<std::string, std::string> labels;  // non-numeric constants (criterion, max_features)

  double get(const std::string& name) const;
  double get_or(const std::string& name, double fallback) const;
  std::string str() const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

// A prior over one hyperparameter: loguniform(a,b), quniform(a,b,q), or a
// constant (numeric or label).
struct Prior {
  enum class Kind { loguniform, quniform, constant };
  Kind kind = Kind::constant;
  double a = 0.0;
  double b = 0.0;
  double q = 1.0;
  double value = 0.0;
  std::string label;  // non-empty for label constants

  static Prior loguniform(double a, double b);
  static Prior quniform(double a, double b, double q);
  static Prior constant(double v);
  static Prior constant_label(std::string s);

  // "loguniform(0.01,1)", "quniform(3,6,1)", "0.5", "mse"
  static Prior parse(const std::string& text);

  bool tunable() const { return kind != Kind::constant; }
  bool contains(double x) const;
  std::string str() const;
  void validate(const std::string& name) const;
};

using PriorSet = std::vector<std::pair<std::string, Prior>>;

// Defaults for every algorithm, as used by the experiment protocol.
PriorSet default_priors(Algorithm a);

// Names each algorithm accepts; used to reject unknown configuration keys.
const std::vector<std::string>& known_hyperparameters(Algorithm a);

}  // namespace faasprof
