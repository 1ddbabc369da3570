#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace faasprof {

namespace {

std::string category_label(const Column& c, std::size_t row) {
  if (!c.numeric) return c.text[row];
  return fmt::format("{:g}", c.values[row]);
}

const Column& numeric_column(const Dataset& d, const std::string& name) {
  const Column& c = d.column(name);
  if (!c.numeric) throw DataError(fmt::format("column '{}' is not numeric", name));
  return c;
}

Column derived(const std::string& name, const Column& from) {
  Column c;
  c.name = name;
  c.source = from.source.empty() ? from.name : from.source;
  return c;
}

// Non-decreasing index sequences of length `len` over [0, n).
void monomials(std::size_t n, std::size_t len, std::vector<std::size_t>& cur,
               std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  const std::size_t start = cur.empty() ? 0 : cur.back();
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    monomials(n, len, cur, out);
    cur.pop_back();
  }
}

void add_feature(Dataset& d, Column c) {
  const std::string name = c.name;
  d.add_column(std::move(c));
  d.features.push_back(name);
}

Dataset run(const FeatureRecipe& recipe, const Dataset& input, FittedRecipe* learn,
            const FittedRecipe* use, bool filter_rows) {
  Dataset d = input;
  for (const auto& f : recipe.features) numeric_column(d, f);
  d.features = recipe.features;

  std::size_t one_hot_i = 0;
  std::size_t normalize_i = 0;
  for (const auto& t : recipe.transforms) {
    switch (t.kind) {
      case TransformKind::select_rows: {
        if (!filter_rows) break;
        std::vector<std::size_t> keep;
        for (std::size_t r = 0; r < d.rows(); ++r)
          if (t.predicate.test(d, r)) keep.push_back(r);
        d = d.select(keep);
        break;
      }
      case TransformKind::one_hot: {
        const Column& src = d.column(t.column);
        std::vector<std::string> cats;
        if (learn) {
          std::set<std::string> s;
          for (std::size_t r = 0; r < d.rows(); ++r) s.insert(category_label(src, r));
          cats.assign(s.begin(), s.end());
          learn->categories.push_back(cats);
        } else {
          cats = use->categories.at(one_hot_i);
        }
        ++one_hot_i;
        std::vector<Column> indicators;
        for (const auto& cat : cats) {
          Column c = derived(t.column + "=" + cat, src);
          c.binary = true;
          for (std::size_t r = 0; r < d.rows(); ++r) c.values.push_back(category_label(src, r) == cat ? 1.0 : 0.0);
          indicators.push_back(std::move(c));
        }
        auto pos = std::find(d.features.begin(), d.features.end(), t.column);
        const bool replace = pos != d.features.end();
        std::size_t at = replace ? static_cast<std::size_t>(pos - d.features.begin()) : d.features.size();
        if (replace) d.features.erase(pos);
        for (auto& c : indicators) {
          const std::string name = c.name;
          d.add_column(std::move(c));
          d.features.insert(d.features.begin() + static_cast<std::ptrdiff_t>(at++), name);
        }
        break;
      }
      case TransformKind::inverse:
      case TransformKind::log: {
        const bool inv = t.kind == TransformKind::inverse;
        const Column& src = numeric_column(d, t.column);
        Column c = derived((inv ? "inv_" : "log_") + t.column, src);
        for (std::size_t r = 0; r < d.rows(); ++r) {
          const double x = src.values[r];
          if (!(x > 0.0))
            throw DataError(fmt::format("{} of non-positive value {} in column '{}' at row {}",
                                        inv ? "inverse" : "log", x, t.column, r + 1));
          c.values.push_back(inv ? 1.0 / x : std::log(x));
        }
        add_feature(d, std::move(c));
        break;
      }
      case TransformKind::polynomial: {
        if (t.degree < 1) throw DataError("polynomial degree must be >= 1");
        const std::vector<std::string> base = d.features;
        std::vector<const Column*> cols;
        for (const auto& f : base) cols.push_back(&numeric_column(d, f));
        std::vector<Column> fresh;
        for (int deg = 2; deg <= t.degree; ++deg) {
          std::vector<std::vector<std::size_t>> terms;
          std::vector<std::size_t> cur;
          monomials(base.size(), static_cast<std::size_t>(deg), cur, terms);
          for (const auto& term : terms) {
            std::map<std::size_t, int> powers;
            for (auto i : term) ++powers[i];
            bool skip = false;
            std::set<std::string> sources;
            for (const auto& [i, p] : powers) {
              if (p > 1 && cols[i]->binary) skip = true;
              if (!sources.insert(cols[i]->source.empty() ? cols[i]->name : cols[i]->source).second) skip = true;
            }
            if (skip) continue;
            std::string name;
            for (const auto& [i, p] : powers) {
              if (!name.empty()) name += '*';
              name += base[i];
              if (p > 1) name += fmt::format("^{}", p);
            }
            Column c;
            c.name = name;
            c.source = name;
            for (std::size_t r = 0; r < d.rows(); ++r) {
              double v = 1.0;
              for (auto i : term) v *= cols[i]->values[r];
              c.values.push_back(v);
            }
            fresh.push_back(std::move(c));
          }
        }
        for (auto& c : fresh) add_feature(d, std::move(c));
        break;
      }
      case TransformKind::normalize: {
        const std::vector<std::string> targets =
            t.column == "*" ? d.features : std::vector<std::string>{t.column};
        std::vector<std::pair<std::string, std::pair<double, double>>> stats;
        if (learn) {
          for (const auto& name : targets) {
            const auto& v = numeric_column(d, name).values;
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(std::max<std::size_t>(v.size(), 1));
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(std::max<std::size_t>(v.size(), 1));
            const double sd = std::sqrt(var);
            stats.push_back({name, {mean, sd > 0.0 ? sd : 1.0}});
          }
          learn->scaling.push_back(stats);
        } else {
          stats = use->scaling.at(normalize_i);
        }
        ++normalize_i;
        for (const auto& [name, ms] : stats) {
          Column& c = d.column(name);
          for (double& x : c.values) x = (x - ms.first) / ms.second;
        }
        break;
      }
    }
  }
  return d;
}

}  // namespace

FittedRecipe fit_recipe(const FeatureRecipe& recipe, const Dataset& d) {
  FittedRecipe fitted;
  fitted.recipe = recipe;
  Dataset out = run(recipe, d, &fitted, nullptr, true);
  fitted.output_features = out.features;
  fitted.fitted = true;
  return fitted;
}

Dataset apply_recipe(const FittedRecipe& fitted, const Dataset& d, bool filter_rows) {
  if (!fitted.fitted) throw DataError("feature recipe has not been fitted");
  return run(fitted.recipe, d, nullptr, &fitted, filter_rows);
}

Dataset engineer_features(const Dataset& d, const FeatureRecipe& recipe) {
  FittedRecipe fitted;
  fitted.recipe = recipe;
  return run(recipe, d, &fitted, nullptr, true);
}

double denormalize(const FittedRecipe& fitted, const std::string& column, double value) {
  for (const auto& stats : fitted.scaling)
    for (const auto& [name, ms] : stats)
      if (name == column) return value * ms.second + ms.first;
  throw DataError(fmt::format("column '{}' was not normalized", column));
}

}  // namespace faasprof
