#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace oracle {
namespace {

using i128 = __int128;

// num / den with den > 0.
struct Frac {
  i128 num = 0;
  i128 den = 1;
};

bool greater(const Frac& a, const Frac& b) { return a.num * b.den > b.num * a.den; }

long long quarter_units(double y) {
  const double scaled = y * 4.0;
  if (scaled != std::round(scaled) || std::abs(scaled) > 1e6) {
    throw std::invalid_argument("oracle regression responses must be multiples of 1/4");
  }
  return static_cast<long long>(scaled);
}

double gini(const std::map<std::size_t, double>& counts, double n) {
  double g = 1.0;
  for (const auto& [c, k] : counts) g -= (k / n) * (k / n);
  return g;
}

double sse(const std::vector<double>& ys) {
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  double s = 0.0;
  for (double y : ys) s += (y - mean) * (y - mean);
  return s;
}

double decrease_of(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows, std::size_t feature,
                   double threshold) {
  const double n = static_cast<double>(rows.size());
  if (d.task().is_classification()) {
    std::map<std::size_t, double> all, left, right;
    double nl = 0.0, nr = 0.0;
    for (auto r : rows) {
      all[d.label(r)] += 1.0;
      if (d.value(r, feature) <= threshold) {
        left[d.label(r)] += 1.0;
        nl += 1.0;
      } else {
        right[d.label(r)] += 1.0;
        nr += 1.0;
      }
    }
    return gini(all, n) - nl / n * gini(left, nl) - nr / n * gini(right, nr);
  }
  std::vector<double> all, left, right;
  for (auto r : rows) {
    all.push_back(d.response(r));
    (d.value(r, feature) <= threshold ? left : right).push_back(d.response(r));
  }
  return sse(all) - sse(left) - sse(right);
}

double leaf_value(const rfsel::Dataset& d, std::vector<std::uint32_t> rows) {
  if (d.task().is_classification()) {
    std::vector<std::size_t> votes(d.task().num_classes, 0);
    for (auto r : rows) ++votes[d.label(r)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) best = c;
    }
    return static_cast<double>(best);
  }
  std::sort(rows.begin(), rows.end());
  double sum = 0.0;
  for (auto r : rows) sum += d.response(r);
  return sum / static_cast<double>(rows.size());
}

bool pure(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows) {
  for (auto r : rows) {
    if (d.response(r) != d.response(rows[0])) return false;
  }
  return true;
}

int grow(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows, std::size_t nodesize, Tree& t) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  Node split = (rows.size() <= nodesize || pure(d, rows)) ? Node{} : best_split(d, rows);
  split.count = rows.size();
  if (split.leaf) {
    split.value = leaf_value(d, rows);
    t.nodes[static_cast<std::size_t>(id)] = split;
    return id;
  }
  std::vector<std::uint32_t> left, right;
  for (auto r : rows) (d.value(r, split.feature) <= split.threshold ? left : right).push_back(r);
  split.left = grow(d, left, nodesize, t);
  split.right = grow(d, right, nodesize, t);
  t.nodes[static_cast<std::size_t>(id)] = split;
  return id;
}

}  // namespace

Node best_split(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows) {
  const bool classify = d.task().is_classification();
  const std::size_t n = rows.size();
  const std::size_t classes = d.task().num_classes;

  Frac parent;
  if (classify) {
    std::vector<i128> totals(classes, 0);
    for (auto r : rows) ++totals[d.label(r)];
    for (auto c : totals) parent.num += c * c;
  } else {
    i128 s = 0;
    for (auto r : rows) s += quarter_units(d.response(r));
    parent.num = s * s;
  }
  parent.den = static_cast<i128>(n);

  Node best;
  Frac best_score;
  bool found = false;
  for (std::size_t f = 0; f < d.num_features(); ++f) {
    std::vector<std::uint32_t> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return d.value(a, f) < d.value(b, f); });
    for (std::size_t cut = 1; cut < n; ++cut) {
      const double lo = d.value(sorted[cut - 1], f);
      const double hi = d.value(sorted[cut], f);
      if (!(lo < hi)) continue;
      const i128 nl = static_cast<i128>(cut);
      const i128 nr = static_cast<i128>(n - cut);
      Frac score;
      if (classify) {
        std::vector<i128> l(classes, 0), r(classes, 0);
        for (std::size_t i = 0; i < n; ++i) ++(i < cut ? l : r)[d.label(sorted[i])];
        i128 sl = 0, sr = 0;
        for (std::size_t c = 0; c < classes; ++c) {
          sl += l[c] * l[c];
          sr += r[c] * r[c];
        }
        score = {sl * nr + sr * nl, nl * nr};
      } else {
        i128 sl = 0, sr = 0;
        for (std::size_t i = 0; i < n; ++i) (i < cut ? sl : sr) += quarter_units(d.response(sorted[i]));
        score = {sl * sl * nr + sr * sr * nl, nl * nr};
      }
      if (!greater(score, parent)) continue;
      if (found && !greater(score, best_score)) continue;
      found = true;
      best_score = score;
      best.leaf = false;
      best.feature = f;
      const double mid = 0.5 * (lo + hi);
      best.threshold = mid < hi ? mid : lo;
    }
  }
  if (found) best.decrease = decrease_of(d, rows, best.feature, best.threshold);
  return best;
}

Tree grow_cart(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows, std::size_t nodesize) {
  Tree t;
  grow(d, rows, nodesize, t);
  return t;
}

double predict(const Tree& t, const std::vector<double>& x) {
  std::size_t id = 0;
  while (!t.nodes[id].leaf) {
    const Node& node = t.nodes[id];
    id = static_cast<std::size_t>(x[node.feature] <= node.threshold ? node.left : node.right);
  }
  return t.nodes[id].value;
}

std::string compare(const rfsel::Tree& impl, const Tree& expected) {
  std::function<std::string(std::uint32_t, std::size_t, const std::string&)> walk =
      [&](std::uint32_t a, std::size_t b, const std::string& path) -> std::string {
    const rfsel::TreeNode& x = impl.nodes[a];
    const Node& y = expected.nodes[b];
    const std::string where = path.empty() ? std::string("root") : path;
    if (x.is_leaf() != y.leaf) {
      return fmt::format("{}: leaf {} vs expected {}", where, x.is_leaf(), y.leaf);
    }
    if (x.count != y.count) return fmt::format("{}: count {} vs expected {}", where, x.count, y.count);
    if (y.leaf) {
      if (x.value != y.value) return fmt::format("{}: value {} vs expected {}", where, x.value, y.value);
      return {};
    }
    if (static_cast<std::size_t>(x.feature) != y.feature || x.threshold != y.threshold) {
      return fmt::format("{}: split ({}, {}) vs expected ({}, {})", where, x.feature, x.threshold, y.feature,
                         y.threshold);
    }
    if (std::abs(x.decrease - y.decrease) > 1e-9 * std::max(1.0, std::abs(y.decrease))) {
      return fmt::format("{}: decrease {} vs expected {}", where, x.decrease, y.decrease);
    }
    std::string left = walk(x.left, static_cast<std::size_t>(y.left), path + "L");
    if (!left.empty()) return left;
    return walk(x.right, static_cast<std::size_t>(y.right), path + "R");
  };
  if (impl.nodes.empty() || expected.nodes.empty()) return "empty tree";
  return walk(0, 0, "");
}

Bagging bagging(const rfsel::Dataset& d, std::size_t ntree, rfsel::RngSeed seed, std::size_t nodesize) {
  Bagging b;
  const std::size_t n = d.num_rows();
  for (std::size_t t = 0; t < ntree; ++t) {
    rfsel::Rng rng = rfsel::make_rng(rfsel::tree_seed(seed, t));
    std::uniform_int_distribution<std::uint32_t> draw(0, static_cast<std::uint32_t>(n - 1));
    std::vector<std::uint32_t> boot(n);
    for (auto& r : boot) r = draw(rng);
    b.trees.push_back(grow_cart(d, boot, nodesize));
    b.bootstraps.push_back(std::move(boot));
  }
  return b;
}

double bagging_predict(const Bagging& b, const rfsel::Task& task, const std::vector<double>& x) {
  if (task.is_classification()) {
    std::vector<std::size_t> votes(task.num_classes, 0);
    for (const auto& t : b.trees) ++votes[static_cast<std::size_t>(predict(t, x))];
    return static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  double sum = 0.0;
  for (const auto& t : b.trees) sum += predict(t, x);
  return sum / static_cast<double>(b.trees.size());
}

std::vector<double> row_of(const rfsel::Dataset& d, std::size_t row) {
  std::vector<double> x(d.num_features());
  for (std::size_t f = 0; f < x.size(); ++f) x[f] = d.value(row, f);
  return x;
}

std::vector<double> brute_force_vi(const rfsel::Forest& f, const rfsel::Dataset& d, rfsel::RngSeed seed) {
  const std::size_t n = d.num_rows();
  const std::size_t p = d.num_features();
  auto loss = [&](double pred, double truth) {
    return d.task().is_classification() ? (pred != truth ? 1.0 : 0.0) : (pred - truth) * (pred - truth);
  };
  std::vector<double> vi(p, 0.0);
  std::size_t with_oob = 0;
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    const rfsel::Tree& tree = f.trees[t];
    std::vector<bool> in_bag(n, false);
    for (auto r : tree.bootstrap) in_bag[r] = true;
    std::vector<std::size_t> oob;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_bag[i]) oob.push_back(i);
    }
    if (oob.empty()) continue;
    ++with_oob;
    const std::size_t m = oob.size();
    std::vector<std::vector<double>> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = row_of(d, oob[i]);
    double base = 0.0;
    for (std::size_t i = 0; i < m; ++i) base += loss(rfsel::predict_tree(tree, x[i]), d.response(oob[i]));
    base /= static_cast<double>(m);
    for (std::size_t j = 0; j < p; ++j) {
      const auto perm = rfsel::oob_permutation(seed, t, j, 0, m);
      std::vector<std::vector<double>> permuted = x;
      for (std::size_t i = 0; i < m; ++i) permuted[i][j] = x[perm[i]][j];
      double err = 0.0;
      for (std::size_t i = 0; i < m; ++i) err += loss(rfsel::predict_tree(tree, permuted[i]), d.response(oob[i]));
      vi[j] += err / static_cast<double>(m) - base;
    }
  }
  if (with_oob > 0) {
    for (double& v : vi) v /= static_cast<double>(with_oob);
  }
  return vi;
}

std::vector<double> curve_tree(const std::vector<double>& ys, std::size_t min_leaf) {
  std::vector<double> fitted(ys.size());
  auto mean_of = [&](std::size_t lo, std::size_t hi) {
    long double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += ys[i];
    return static_cast<double>(s / static_cast<long double>(hi - lo));
  };
  auto sse_of = [&](std::size_t lo, std::size_t hi) {
    const long double m = mean_of(lo, hi);
    long double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += (ys[i] - m) * (ys[i] - m);
    return s;
  };
  std::function<void(std::size_t, std::size_t)> fit = [&](std::size_t lo, std::size_t hi) {
    const long double parent = sse_of(lo, hi);
    std::size_t best_cut = 0;
    long double best = parent;
    for (std::size_t cut = lo + min_leaf; cut + min_leaf <= hi; ++cut) {
      const long double s = sse_of(lo, cut) + sse_of(cut, hi);
      if (best_cut == 0 ? s < best : s < best - 1e-12L * std::abs(best)) {
        best = s;
        best_cut = cut;
      }
    }
    if (best_cut == 0 || !(parent - best > 1e-12L * std::max(parent, 1.0L))) {
      const double m = mean_of(lo, hi);
      for (std::size_t i = lo; i < hi; ++i) fitted[i] = m;
      return;
    }
    fit(lo, best_cut);
    fit(best_cut, hi);
  };
  fit(0, ys.size());
  return fitted;
}

}  // namespace oracle
