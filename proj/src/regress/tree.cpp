#include <algorithm>
#include <cmath>
#include <numeric>

#include "regress/model.hpp"

namespace faasprof {

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t Tree::leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

// Positions index into the sample; every node keeps one position list per
// feature, sorted by that feature, so split search is linear.
class Grower {
public:
  Grower(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample, const TreeLimits& lim)
      : x_(x), lim_(lim), rows_(sample.begin(), sample.end()), y_(sample.size()), left_(sample.size(), 0) {
    for (std::size_t i = 0; i < rows_.size(); ++i) y_[i] = y[rows_[i]];
  }

  Tree run() {
    const std::size_t n = rows_.size();
    std::vector<std::vector<std::size_t>> lists(x_.cols(), std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      auto& l = lists[f];
      std::iota(l.begin(), l.end(), 0);
      std::stable_sort(l.begin(), l.end(), [&](std::size_t a, std::size_t b) { return value(a, f) < value(b, f); });
    }
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    tree_.nodes.emplace_back();
    build(0, std::move(all), std::move(lists), 0);
    return std::move(tree_);
  }

private:
  double value(std::size_t pos, std::size_t f) const { return x_(rows_[pos], f); }

  void build(std::size_t node, std::vector<std::size_t> members, std::vector<std::vector<std::size_t>> lists,
             int depth) {
    const std::size_t m = members.size();
    double sum = 0.0;
    for (auto p : members) sum += y_[p];
    const double mean = sum / static_cast<double>(m);
    tree_.nodes[node].value = lim_.leaf_scale * mean;

    if (m < lim_.min_samples_split || m < 2 * lim_.min_samples_leaf) return;
    if (lim_.max_depth >= 0 && depth >= lim_.max_depth) return;

    double sse = 0.0;
    for (auto p : members) sse += (y_[p] - mean) * (y_[p] - mean);
    if (!(sse > 0.0)) return;

    // Sums are taken over centred targets to keep the gain free of cancellation.
    double centred_total = 0.0;
    for (auto p : members) centred_total += y_[p] - mean;
    const double parent = centred_total * centred_total / static_cast<double>(m);

    double best_gain = std::max(lim_.min_gain, 1e-12 * sse);
    int best_f = -1;
    std::size_t best_cut = 0;
    double best_threshold = 0.0;
    for (std::size_t f = 0; f < lists.size(); ++f) {
      const auto& l = lists[f];
      double sl = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        sl += y_[l[i]] - mean;
        const double a = value(l[i], f);
        const double b = value(l[i + 1], f);
        if (!(a < b)) continue;
        const std::size_t cl = i + 1;
        const std::size_t cr = m - cl;
        if (cl < lim_.min_samples_leaf || cr < lim_.min_samples_leaf) continue;
        const double sr = centred_total - sl;
        const double gain = sl * sl / static_cast<double>(cl) + sr * sr / static_cast<double>(cr) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_cut = cl;
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best_threshold = t;
        }
      }
    }
    if (best_f < 0) return;

    const auto& split_list = lists[static_cast<std::size_t>(best_f)];
    for (std::size_t i = 0; i < m; ++i) left_[split_list[i]] = i < best_cut ? 1 : 0;

    std::vector<std::vector<std::size_t>> ll(lists.size()), rl(lists.size());
    for (std::size_t f = 0; f < lists.size(); ++f) {
      ll[f].reserve(best_cut);
      rl[f].reserve(m - best_cut);
      for (auto p : lists[f]) (left_[p] ? ll[f] : rl[f]).push_back(p);
    }
    std::vector<std::size_t> lm, rm;
    for (auto p : members) (left_[p] ? lm : rm).push_back(p);
    lists.clear();
    members.clear();

    const auto li = tree_.nodes.size();
    tree_.nodes.emplace_back();
    const auto ri = tree_.nodes.size();
    tree_.nodes.emplace_back();
    auto& n = tree_.nodes[node];
    n.feature = best_f;
    n.threshold = best_threshold;
    n.left = static_cast<int>(li);
    n.right = static_cast<int>(ri);
    build(li, std::move(lm), std::move(ll), depth + 1);
    build(ri, std::move(rm), std::move(rl), depth + 1);
  }

  const Matrix& x_;
  TreeLimits lim_;
  std::vector<std::size_t> rows_;
  std::vector<double> y_;
  std::vector<char> left_;
  Tree tree_;
};

}  // namespace

Tree grow_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> sample,
               const TreeLimits& limits) {
  return Grower(x, y, sample, limits).run();
}

}  // namespace faasprof
