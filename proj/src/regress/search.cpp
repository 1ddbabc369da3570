#include "regress/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/random.hpp"
#include "eval/metrics.hpp"
#include "regress/linalg.hpp"

namespace faasprof {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double cv_mape(const FitFn& fit_fn, const Matrix& x, std::span<const double> y, const std::vector<Split>& folds) {
  std::vector<double> truth, pred;
  try {
    for (const auto& f : folds) {
      const Matrix xt = x.select_rows(f.train);
      const auto yt = select(y, f.train);
      const RegressionModel m = fit_fn(xt, yt);
      const auto p = m.predict(x.select_rows(f.test));
      for (std::size_t i = 0; i < f.test.size(); ++i) {
        if (!std::isfinite(p[i])) return kInf;
        truth.push_back(y[f.test[i]]);
        pred.push_back(p[i]);
      }
    }
    return mape(truth, pred);
  } catch (const Error&) {
    return kInf;
  }
}

SfsResult sfs(const FitFn& fit_fn, const Matrix& x, std::span<const double> y, std::size_t max_features,
              const std::vector<Split>& folds) {
  const std::size_t total = x.cols();
  if (total == 0) throw DataError("sfs: no candidate features");
  if (max_features > total)
    throw ConfigError(fmt::format("sfs: max_features {} exceeds the {} available features", max_features, total));
  const std::size_t limit = max_features == 0 ? total : max_features;

  SfsResult r;
  r.score = kInf;
  std::vector<bool> used(total, false);
  while (r.selected.size() < limit) {
    double best = kInf;
    std::size_t best_c = total;
    for (std::size_t c = 0; c < total; ++c) {
      if (used[c]) continue;
      auto cols = r.selected;
      cols.push_back(c);
      const double s = cv_mape(fit_fn, x.select_cols(cols), y, folds);
      if (s < best) {
        best = s;
        best_c = c;
      }
    }
    const double margin = 1e-12 * (std::isfinite(r.score) ? std::max(1.0, r.score) : 1.0);
    if (best_c == total || !(best < r.score - margin)) break;
    r.selected.push_back(best_c);
    used[best_c] = true;
    r.score = best;
  }
  if (r.selected.empty()) throw NumericError("sfs: every single-feature model failed to fit");
  return r;
}

std::vector<std::string> sfs(const FitFn& fit_fn, const Dataset& d, std::size_t max_features,
                             const std::vector<Split>& folds) {
  const auto r = sfs(fit_fn, d.feature_matrix(), d.targets(), max_features, folds);
  std::vector<std::string> names;
  for (auto c : r.selected) names.push_back(d.features[c]);
  return names;
}

// --- Bayesian optimisation -------------------------------------------------

namespace {

struct Dim {
  std::string name;
  Prior prior;
};

double decode(const Prior& p, double u) {
  u = std::clamp(u, 0.0, 1.0);
  if (p.kind == Prior::Kind::loguniform) {
    const double v = std::exp(std::log(p.a) + u * (std::log(p.b) - std::log(p.a)));
    return std::clamp(v, p.a, p.b);
  }
  double v = std::round((p.a + u * (p.b - p.a)) / p.q) * p.q;
  if (v > p.b + 1e-12) v -= p.q;
  if (v < p.a - 1e-12) v += p.q;
  return v;
}

double encode(const Prior& p, double v) {
  if (p.kind == Prior::Kind::loguniform) return (std::log(v) - std::log(p.a)) / (std::log(p.b) - std::log(p.a));
  return (v - p.a) / (p.b - p.a);
}

Hyperparameters assemble(Algorithm algorithm, const PriorSet& priors, std::span<const double> u) {
  Hyperparameters hp;
  hp.algorithm = algorithm;
  std::size_t k = 0;
  for (const auto& [name, p] : priors) {
    if (p.tunable()) {
      hp.values[name] = decode(p, u[k++]);
    } else if (p.label.empty()) {
      hp.values[name] = p.value;
    } else {
      hp.labels[name] = p.label;
    }
  }
  return hp;
}

// Snaps u to the point its decoded value encodes to, so discrete dimensions
// see their actual location.
std::vector<double> snap(const std::vector<Dim>& dims, std::vector<double> u) {
  for (std::size_t k = 0; k < dims.size(); ++k) u[k] = encode(dims[k].prior, decode(dims[k].prior, u[k]));
  return u;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

class Surrogate {
public:
  Surrogate(const std::vector<std::vector<double>>& u, const std::vector<double>& y) : u_(u) {
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 1.0;
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) y_[i] = (y[i] - mean) / sd;
    best_ = *std::min_element(y_.begin(), y_.end());

    double best_lml = -kInf;
    for (double ell : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      Matrix k = gram(ell);
      Matrix l;
      if (!linalg::cholesky(k, l)) continue;
      auto alpha = linalg::cholesky_solve(l, y_);
      // signal variance profiled out: s2 = y' K^-1 y / n
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) quad += y_[i] * alpha[i];
      const double s2 = std::max(quad / static_cast<double>(n), 1e-12);
      double lml = -0.5 * static_cast<double>(n) * std::log(s2);
      for (std::size_t i = 0; i < n; ++i) lml -= std::log(l(i, i));
      if (lml > best_lml) {
        best_lml = lml;
        ell_ = ell;
        s2_ = s2;
        l_ = std::move(l);
        alpha_ = std::move(alpha);
      }
    }
    ok_ = best_lml > -kInf;
  }

  bool ok() const { return ok_; }

  double expected_improvement(std::span<const double> x) const {
    const std::size_t n = u_.size();
    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = kernel(x, u_[i], ell_);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += ks[i] * alpha_[i];
    const auto v = linalg::cholesky_solve(l_, ks);
    double var = 1.0;
    for (std::size_t i = 0; i < n; ++i) var -= ks[i] * v[i];
    const double sigma = std::sqrt(s2_ * std::max(var, 1e-12));
    const double z = (best_ - mu) / sigma;
    return (best_ - mu) * normal_cdf(z) + sigma * normal_pdf(z);
  }

private:
  static double kernel(std::span<const double> a, std::span<const double> b, double ell) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-d2 / (2.0 * ell * ell));
  }

  Matrix gram(double ell) const {
    const std::size_t n = u_.size();
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) k(i, j) = kernel(u_[i], u_[j], ell) + (i == j ? 1e-6 : 0.0);
    return k;
  }

  const std::vector<std::vector<double>>& u_;
  std::vector<double> y_;
  double ell_ = 0.2;
  Matrix l_;
  std::vector<double> alpha_;
  double best_ = 0.0;
  double s2_ = 1.0;
  bool ok_ = false;
};

constexpr int kRandomCandidates = 512;
constexpr int kLocalCandidates = 64;
constexpr double kLocalSteps[] = {0.01, 0.03, 0.1};

}  // namespace

Hyperparameters sample_prior(Algorithm algorithm, const PriorSet& priors, std::uint64_t seed) {
  std::vector<Dim> dims;
  for (const auto& [name, p] : priors) {
    p.validate(name);
    if (p.tunable()) dims.push_back({name, p});
  }
  Rng rng(seed);
  std::vector<double> u(dims.size());
  for (auto& v : u) v = rng.uniform();
  return assemble(algorithm, priors, u);
}

BoResult tune_bo(const Objective& objective, Algorithm algorithm, const PriorSet& priors, int budget,
                 std::uint64_t seed) {
  if (budget < 1) throw ConfigError(fmt::format("optimisation budget must be >= 1, got {}", budget));
  std::vector<Dim> dims;
  for (const auto& [name, p] : priors) {
    p.validate(name);
    if (p.tunable()) dims.push_back({name, p});
  }
  const std::size_t d = dims.size();

  Rng rng(derive_seed(seed, "bo"));
  BoResult result;
  std::vector<std::vector<double>> us;
  std::vector<double> scores;

  auto evaluate = [&](std::vector<double> u) {
    Hyperparameters hp = assemble(algorithm, priors, u);
    double s;
    try {
      s = objective(hp);
    } catch (const Error&) {
      s = kInf;
    }
    if (std::isnan(s)) s = kInf;
    result.trials.push_back({hp, s});
    us.push_back(std::move(u));
    scores.push_back(s);
  };
  auto random_point = [&] {
    std::vector<double> u(d);
    for (auto& v : u) v = rng.uniform();
    return snap(dims, std::move(u));
  };
  auto seen = [&](const std::vector<double>& u) {
    const auto hp = assemble(algorithm, priors, u);
    return std::any_of(result.trials.begin(), result.trials.end(), [&](const Trial& t) { return t.hp == hp; });
  };

  const int total = d == 0 ? 1 : budget;
  for (int i = 0; i < total; ++i) {
    if (i < kInitialRandomPoints) {
      evaluate(random_point());
      continue;
    }
    // Surrogate on log(score + median score): the median floor keeps a lucky
    // near-zero score from dominating the fit. Failures sit just above the worst.
    std::vector<double> finite;
    for (double s : scores)
      if (std::isfinite(s)) finite.push_back(std::max(s, 0.0));
    double floor = 1e-9;
    if (!finite.empty()) {
      std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(finite.size() / 2), finite.end());
      floor = std::max(floor, finite[finite.size() / 2]);
    }
    auto warp = [floor](double s) { return std::log(std::max(s, 0.0) + floor); };
    std::vector<double> y;
    double worst = -kInf;
    for (double s : scores)
      if (std::isfinite(s)) worst = std::max(worst, warp(s));
    if (!std::isfinite(worst)) {
      evaluate(random_point());
      continue;
    }
    for (double s : scores) y.push_back(std::isfinite(s) ? warp(s) : worst + 1.0);
    Surrogate gp(us, y);
    if (!gp.ok()) {
      evaluate(random_point());
      continue;
    }

    std::vector<std::vector<double>> cands;
    for (int c = 0; c < kRandomCandidates; ++c) cands.push_back(random_point());
    const auto best_i =
        static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    for (int c = 0; c < kLocalCandidates; ++c) {
      std::vector<double> u = us[best_i];
      const double step = kLocalSteps[static_cast<std::size_t>(c) % std::size(kLocalSteps)];
      for (auto& v : u) v = std::clamp(v + step * rng.normal(), 0.0, 1.0);
      cands.push_back(snap(dims, std::move(u)));
    }
    double best_ei = -kInf;
    std::size_t pick = cands.size();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (seen(cands[c])) continue;
      const double ei = gp.expected_improvement(cands[c]);
      if (ei > best_ei) {
        best_ei = ei;
        pick = c;
      }
    }
    evaluate(pick == cands.size() ? cands.front() : cands[pick]);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] < scores[best]) best = i;
  result.best = result.trials[best].hp;
  result.best_score = scores[best];
  return result;
}

}  // namespace faasprof
