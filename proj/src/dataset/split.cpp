#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/random.hpp"
#include "dataset/dataset.hpp"

namespace faasprof {

namespace {

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

Split split(const Dataset& d, const SplitSpec& spec) {
  const std::size_t n = d.rows();
  Split out;
  switch (spec.kind) {
    case SplitKind::none:
      out.train.resize(n);
      std::iota(out.train.begin(), out.train.end(), 0);
      return out;
    case SplitKind::kfold:
      throw DataError("kfold produces several splits; use kfold()");
    case SplitKind::holdout: {
      if (!(spec.fraction >= 0.0 && spec.fraction < 1.0))
        throw DataError(fmt::format("holdout fraction {} outside [0,1)", spec.fraction));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(derive_seed(spec.seed, "holdout"));
      rng.shuffle(idx.begin(), idx.end());
      const auto ntest = static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(n) + 0.5));
      out.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(ntest));
      out.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(ntest), idx.end());
      std::sort(out.test.begin(), out.test.end());
      std::sort(out.train.begin(), out.train.end());
      return out;
    }
    case SplitKind::interpolation: {
      const auto col = d.numeric(spec.column);
      for (double held : spec.values)
        if (std::none_of(col.begin(), col.end(), [&](double x) { return same_value(x, held); }))
          throw DataError(fmt::format("interpolation value {:g} matches no row of column '{}'", held, spec.column));
      for (std::size_t r = 0; r < n; ++r) {
        const bool held = std::any_of(spec.values.begin(), spec.values.end(),
                                      [&](double v) { return same_value(col[r], v); });
        (held ? out.test : out.train).push_back(r);
      }
      return out;
    }
    case SplitKind::extrapolation: {
      const auto col = d.numeric(spec.column);
      for (std::size_t r = 0; r < n; ++r) (col[r] > spec.threshold ? out.test : out.train).push_back(r);
      if (out.test.empty())
        throw DataError(fmt::format("extrapolation threshold {:g} leaves no row of '{}' in the test set",
                                    spec.threshold, spec.column));
      return out;
    }
  }
  return out;
}

std::vector<Split> kfold(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("kfold needs k >= 2");
  if (n < static_cast<std::size_t>(k)) throw DataError(fmt::format("kfold with k={} needs at least {} rows, have {}", k, k, n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(idx.begin(), idx.end());
  std::vector<Split> folds(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= pos && i < pos + len)
        folds[f].test.push_back(idx[i]);
      else
        folds[f].train.push_back(idx[i]);
    }
    std::sort(folds[f].test.begin(), folds[f].test.end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
    pos += len;
  }
  return folds;
}

std::vector<Split> group_kfold(std::span<const double> groups, int k, std::uint64_t seed) {
  std::vector<double> values(groups.begin(), groups.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) throw DataError("grouped folds need at least 2 distinct group values");
  const auto folds_n = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 2)), values.size());
  Rng rng(derive_seed(seed, "group_kfold"));
  rng.shuffle(values.begin(), values.end());
  std::vector<Split> folds(folds_n);
  for (std::size_t r = 0; r < groups.size(); ++r) {
    const auto pos = static_cast<std::size_t>(std::find(values.begin(), values.end(), groups[r]) - values.begin());
    for (std::size_t f = 0; f < folds_n; ++f) (pos % folds_n == f ? folds[f].test : folds[f].train).push_back(r);
  }
  return folds;
}

}  // namespace faasprof
