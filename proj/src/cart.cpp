#include "rfsel/cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "rfsel/error.hpp"
#include "rfsel/simd/kernels.hpp"

namespace rfsel {

std::size_t default_nodesize(const Task& task) { return task.is_classification() ? 1 : 5; }

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, level] = stack.back();
    stack.pop_back();
    best = std::max(best, level);
    if (!nodes[id].is_leaf()) {
      stack.emplace_back(nodes[id].left, level + 1);
      stack.emplace_back(nodes[id].right, level + 1);
    }
  }
  return best;
}

std::vector<std::size_t> Tree::used_features() const {
  std::vector<std::size_t> used;
  for (const auto& node : nodes) {
    if (!node.is_leaf()) used.push_back(static_cast<std::size_t>(node.feature));
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

namespace {

constexpr double kTieTolerance = 1e-12;

double midpoint(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  // Adjacent doubles: the midpoint may round onto `hi`.
  return mid < hi ? mid : lo;
}

// Scores every cut of one node along one feature. Inputs are the node's
// values sorted ascending with their labels or responses.
class SplitScanner {
 public:
  void score_classification(std::span<const std::uint32_t> labels, std::span<const double> class_totals) {
    const std::size_t k = labels.size();
    const std::size_t m = k - 1;
    const std::size_t classes = class_totals.size();
    left_.resize(classes * m);
    for (std::size_t c = 0; c < classes; ++c) {
      double* out = left_.data() + c * m;
      double running = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        running += labels[t] == c ? 1.0 : 0.0;
        out[t] = running;
      }
    }
    scores_.resize(m);
    simd::gini_split_scores(left_, class_totals, m, static_cast<double>(k), scores_);
  }

  // Returns the node's response total, summed in the given order.
  double score_regression(std::span<const double> ys) {
    const std::size_t k = ys.size();
    const std::size_t m = k - 1;
    left_.resize(m);
    double running = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      running += ys[t];
      left_[t] = running;
    }
    const double total = running + ys[m];
    scores_.resize(m);
    simd::sse_split_scores(left_, total, static_cast<double>(k), scores_);
    return total;
  }

  // Largest score over cuts between distinct values; -inf if none.
  double max_valid(std::span<const double> xs) const {
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t m = scores_.size();
    for (std::size_t t = 0; t < m; ++t) {
      const double s = xs[t] < xs[t + 1] ? scores_[t] : -std::numeric_limits<double>::infinity();
      best = s > best ? s : best;
    }
    return best;
  }

  // First cut between distinct values scoring at least `cutoff`.
  std::optional<std::size_t> first_at_least(std::span<const double> xs, double cutoff) const {
    for (std::size_t t = 0; t < scores_.size(); ++t) {
      if (xs[t] < xs[t + 1] && scores_[t] >= cutoff) return t;
    }
    return std::nullopt;
  }

  double score(std::size_t t) const { return scores_[t]; }

  // Class counts of the left part at cut t (classification only).
  double left_count(std::size_t cls, std::size_t t) const { return left_[cls * scores_.size() + t]; }

 private:
  std::vector<double> left_;
  std::vector<double> scores_;
};

// Exact test of a positive Gini decrease from integer counts:
// SL/nl + SR/nr > ST/N  <=>  (SL*nr + SR*nl) * N > ST * nl * nr.
bool gini_gain_positive(std::span<const double> left_counts, std::span<const double> totals,
                        std::size_t nl, std::size_t n) {
  using i128 = __int128;
  i128 sl = 0, sr = 0, st = 0;
  for (std::size_t c = 0; c < totals.size(); ++c) {
    const auto l = static_cast<i128>(left_counts[c]);
    const auto t = static_cast<i128>(totals[c]);
    sl += l * l;
    sr += (t - l) * (t - l);
    st += t * t;
  }
  const i128 nr = static_cast<i128>(n - nl);
  return (sl * nr + sr * static_cast<i128>(nl)) * static_cast<i128>(n) >
         st * static_cast<i128>(nl) * nr;
}

bool sse_gain_positive(double score, double total, std::size_t n) {
  const double parent = total * total / static_cast<double>(n);
  return score - parent > kTieTolerance * std::abs(score);
}

double gini_decrease(double score, std::span<const double> totals, std::size_t n) {
  double st = 0.0;
  for (double t : totals) st += t * t;
  const double nn = static_cast<double>(n);
  return (score - st / nn) / nn;
}

struct NodeBest {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;
  std::size_t left_count = 0;
  std::vector<double> left_class_counts;  // classification only
};

// Best split of one node over candidate features. `gather(f, xs, labels, ys)`
// fills the node's values of feature f sorted ascending, with their labels
// or responses. Among cuts scoring within kTieTolerance (relative) of the
// best score, the lowest feature and then the lowest threshold wins.
class NodeSearch {
 public:
  template <typename Gather>
  NodeBest run(std::span<const std::size_t> features_ascending, std::size_t k, const Task& task,
               std::span<const double> class_totals, Gather&& gather) {
    xs_.resize(k);
    labels_.resize(k);
    ys_.resize(k);
    const bool classify = task.is_classification();
    auto score = [&](std::size_t f) -> double {
      gather(f, xs_, labels_, ys_);
      if (!(xs_.front() < xs_.back())) return 0.0;
      if (classify) {
        scanner_.score_classification(labels_, class_totals);
        return 0.0;
      }
      return scanner_.score_regression(ys_);
    };

    maxima_.clear();
    double global = -std::numeric_limits<double>::infinity();
    for (std::size_t f : features_ascending) {
      score(f);
      if (!(xs_.front() < xs_.back())) continue;
      const double best = scanner_.max_valid(xs_);
      maxima_.emplace_back(f, best);
      global = std::max(global, best);
    }

    NodeBest out;
    if (maxima_.empty()) return out;
    const double cutoff = global - kTieTolerance * std::abs(global);
    for (const auto& [f, best] : maxima_) {
      if (best < cutoff) continue;
      const double total = score(f);
      const auto t = scanner_.first_at_least(xs_, cutoff);
      if (!t) continue;
      const std::size_t nl = *t + 1;
      const double s = scanner_.score(*t);
      if (classify) {
        out.left_class_counts.resize(class_totals.size());
        for (std::size_t c = 0; c < class_totals.size(); ++c) {
          out.left_class_counts[c] = scanner_.left_count(c, *t);
        }
        if (!gini_gain_positive(out.left_class_counts, class_totals, nl, k)) return out;
        out.decrease = gini_decrease(s, class_totals, k);
      } else {
        if (!sse_gain_positive(s, total, k)) return out;
        out.decrease = s - total * total / static_cast<double>(k);
      }
      out.found = true;
      out.feature = f;
      out.threshold = midpoint(xs_[*t], xs_[*t + 1]);
      out.left_count = nl;
      return out;
    }
    return out;
  }

 private:
  SplitScanner scanner_;
  std::vector<double> xs_;
  std::vector<std::uint32_t> labels_;
  std::vector<double> ys_;
  std::vector<std::pair<std::size_t, double>> maxima_;
};

}  // namespace

std::optional<SplitCandidate> best_split(std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         const Dataset& d) {
  if (rows.empty() || candidate_features.empty()) return std::nullopt;
  const Task& task = d.task();
  const std::size_t k = rows.size();
  if (k < 2) return std::nullopt;

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  std::vector<double> class_totals(task.num_classes, 0.0);
  if (task.is_classification()) {
    for (std::size_t r : rows) class_totals[d.label(r)] += 1.0;
  }

  std::vector<std::size_t> sorted_rows(rows.begin(), rows.end());
  NodeSearch search;
  const NodeBest best = search.run(
      features, k, task, class_totals,
      [&](std::size_t f, std::vector<double>& xs, std::vector<std::uint32_t>& labels,
          std::vector<double>& ys) {
        auto col = d.column(f);
        std::sort(sorted_rows.begin(), sorted_rows.end(), [&](std::size_t a, std::size_t b) {
          return col[a] < col[b] || (col[a] == col[b] && a < b);
        });
        for (std::size_t t = 0; t < k; ++t) {
          xs[t] = col[sorted_rows[t]];
          labels[t] = task.is_classification() ? static_cast<std::uint32_t>(d.label(sorted_rows[t])) : 0;
          ys[t] = d.response(sorted_rows[t]);
        }
      });
  if (!best.found) return std::nullopt;
  return SplitCandidate{best.feature, best.threshold, best.decrease, best.left_count};
}

SortedColumns::SortedColumns(const Dataset& d) : rows_(d.num_rows()), orders_(d.num_rows() * d.num_features()) {
  for (std::size_t f = 0; f < d.num_features(); ++f) {
    auto col = d.column(f);
    auto out = orders_.begin() + static_cast<std::ptrdiff_t>(f * rows_);
    std::iota(out, out + static_cast<std::ptrdiff_t>(rows_), 0u);
    std::sort(out, out + static_cast<std::ptrdiff_t>(rows_), [&](std::uint32_t a, std::uint32_t b) {
      return col[a] < col[b] || (col[a] == col[b] && a < b);
    });
  }
}

std::vector<std::uint32_t> draw_bootstrap(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::vector<std::uint32_t> boot(n);
  for (auto& b : boot) b = pick(rng);
  return boot;
}

Tree grow_tree(const Dataset& d, std::span<const std::uint32_t> bootstrap, const TreeConfig& cfg,
               Rng& rng, const SortedColumns* sorted) {
  if (bootstrap.empty()) throw DataError("cannot grow a tree on an empty bootstrap sample");
  const std::size_t n = d.num_rows();
  const std::size_t p = d.num_features();
  if (cfg.mtry < 1 || cfg.mtry > p) {
    throw ConfigError(fmt::format("mtry must lie in 1..{}, got {}", p, cfg.mtry));
  }
  if (cfg.nodesize < 1) throw ConfigError("nodesize must be at least 1");
  const Task& task = d.task();
  const bool classify = task.is_classification();

  std::optional<SortedColumns> local_sort;
  if (sorted == nullptr) {
    local_sort.emplace(d);
    sorted = &*local_sort;
  }

  const std::size_t slots = bootstrap.size();
  for (std::uint32_t r : bootstrap) {
    if (r >= n) throw DataError(fmt::format("bootstrap row {} out of range", r));
  }

  // Slots grouped by row, ascending.
  std::vector<std::uint32_t> row_start(n + 1, 0);
  for (std::uint32_t r : bootstrap) ++row_start[r + 1];
  for (std::size_t r = 0; r < n; ++r) row_start[r + 1] += row_start[r];
  std::vector<std::uint32_t> slots_by_row(slots);
  {
    std::vector<std::uint32_t> fill(row_start.begin(), row_start.end() - 1);
    for (std::uint32_t s = 0; s < slots; ++s) slots_by_row[fill[bootstrap[s]]++] = s;
  }

  // order[f * slots + i]: slots sorted by feature f. Every node owns the
  // same [lo, hi) range in each feature's list.
  std::vector<std::uint32_t> order(p * slots);
  for (std::size_t f = 0; f < p; ++f) {
    std::size_t idx = f * slots;
    for (std::uint32_t r : sorted->order(f)) {
      for (std::uint32_t j = row_start[r]; j < row_start[r + 1]; ++j) order[idx++] = slots_by_row[j];
    }
  }

  std::vector<double> slot_y(slots);
  std::vector<std::uint32_t> slot_label(slots, 0);
  for (std::uint32_t s = 0; s < slots; ++s) {
    slot_y[s] = d.response(bootstrap[s]);
    if (classify) slot_label[s] = static_cast<std::uint32_t>(d.label(bootstrap[s]));
  }

  Tree tree;
  tree.bootstrap.assign(bootstrap.begin(), bootstrap.end());
  tree.nodes.reserve(2 * slots);
  tree.nodes.emplace_back();

  std::vector<std::size_t> feature_pool(p);
  std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
  std::vector<std::size_t> candidates(cfg.mtry);
  std::vector<double> class_totals(task.num_classes, 0.0);
  std::vector<std::uint8_t> goes_left(slots, 0);
  std::vector<std::uint32_t> buffer(slots);
  std::vector<std::uint32_t> leaf_rows;
  NodeSearch search;

  struct Pending {
    std::uint32_t id;
    std::uint32_t lo;
    std::uint32_t hi;
    // Feature whose list holds the node's slots contiguously; only that
    // list is valid when the parent skipped partitioning.
    std::uint32_t list_feature;
  };
  std::vector<Pending> stack{{0, 0, static_cast<std::uint32_t>(slots), 0}};

  while (!stack.empty()) {
    const Pending item = stack.back();
    stack.pop_back();
    const std::size_t k = item.hi - item.lo;
    const std::uint32_t* members = order.data() + item.list_feature * slots + item.lo;

    bool pure = true;
    if (classify) {
      std::fill(class_totals.begin(), class_totals.end(), 0.0);
      for (std::size_t t = 0; t < k; ++t) class_totals[slot_label[members[t]]] += 1.0;
      pure = std::count_if(class_totals.begin(), class_totals.end(), [](double c) { return c > 0; }) <= 1;
    } else {
      const double first = slot_y[members[0]];
      for (std::size_t t = 1; t < k && pure; ++t) pure = slot_y[members[t]] == first;
    }

    NodeBest best;
    if (!pure && k > cfg.nodesize) {
      for (std::size_t i = 0; i < cfg.mtry; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, p - 1);
        std::swap(feature_pool[i], feature_pool[pick(rng)]);
        candidates[i] = feature_pool[i];
      }
      std::sort(candidates.begin(), candidates.end());
      best = search.run(candidates, k, task, class_totals,
                        [&](std::size_t f, std::vector<double>& xs, std::vector<std::uint32_t>& labels,
                            std::vector<double>& ys) {
                          const double* col = d.column(f).data();
                          const std::uint32_t* list = order.data() + f * slots + item.lo;
                          for (std::size_t t = 0; t < k; ++t) xs[t] = col[bootstrap[list[t]]];
                          if (classify) {
                            for (std::size_t t = 0; t < k; ++t) labels[t] = slot_label[list[t]];
                          } else {
                            for (std::size_t t = 0; t < k; ++t) ys[t] = slot_y[list[t]];
                          }
                        });
    }

    TreeNode& node = tree.nodes[item.id];
    node.count = static_cast<std::uint32_t>(k);
    if (!best.found) {
      if (classify) {
        node.value = static_cast<double>(
            std::max_element(class_totals.begin(), class_totals.end()) - class_totals.begin());
      } else {
        // Sum in ascending row order so the mean does not depend on the
        // feature lists' layout.
        leaf_rows.resize(k);
        for (std::size_t t = 0; t < k; ++t) leaf_rows[t] = bootstrap[members[t]];
        std::sort(leaf_rows.begin(), leaf_rows.end());
        double sum = 0.0;
        for (std::uint32_t r : leaf_rows) sum += d.response(r);
        node.value = sum / static_cast<double>(k);
      }
      continue;
    }

    // Children that will be leaves whatever their feature lists hold.
    const std::size_t nl = best.left_count;
    const std::size_t nr = k - nl;
    auto terminal = [&](std::size_t size, bool left) {
      if (size <= cfg.nodesize) return true;
      if (!classify) return false;
      std::size_t present = 0;
      for (std::size_t c = 0; c < class_totals.size(); ++c) {
        const double cnt = left ? best.left_class_counts[c] : class_totals[c] - best.left_class_counts[c];
        present += cnt > 0 ? 1 : 0;
      }
      return present <= 1;
    };
    const bool partition = !(terminal(nl, true) && terminal(nr, false));
    const auto split_feature = static_cast<std::uint32_t>(best.feature);

    const double* split_col = d.column(best.feature).data();
    for (std::size_t t = 0; t < k && partition; ++t) {
      const std::uint32_t s = members[t];
      goes_left[s] = split_col[bootstrap[s]] <= best.threshold ? 1 : 0;
    }
    for (std::size_t f = 0; f < p && partition; ++f) {
      // Already ordered left part first.
      if (f == best.feature) continue;
      std::uint32_t* list = order.data() + f * slots + item.lo;
      std::size_t left = 0;
      std::size_t right = 0;
      for (std::size_t t = 0; t < k; ++t) {
        const std::uint32_t s = list[t];
        if (goes_left[s]) {
          list[left++] = s;
        } else {
          buffer[right++] = s;
        }
      }
      std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(right), list + left);
    }

    const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
    const auto mid = static_cast<std::uint32_t>(item.lo + best.left_count);
    TreeNode& parent = tree.nodes[item.id];
    parent.feature = static_cast<std::int32_t>(best.feature);
    parent.threshold = best.threshold;
    parent.decrease = best.decrease;
    parent.left = left_id;
    parent.right = left_id + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    stack.push_back({left_id + 1, mid, item.hi, split_feature});
    stack.push_back({left_id, item.lo, mid, split_feature});
  }
  return tree;
}

Tree grow_tree(const Dataset& d, std::span<const std::uint32_t> bootstrap, const TreeConfig& cfg) {
  Rng rng = make_rng(cfg.seed);
  return grow_tree(d, bootstrap, cfg, rng);
}

double predict_tree(const Tree& t, std::span<const double> x) {
  return t.predict_with([&](std::size_t f) { return x[f]; });
}

double predict_tree(const Tree& t, const Dataset& d, std::size_t row) {
  return t.predict_with([&](std::size_t f) { return d.value(row, f); });
}

std::string tree_to_json(const Tree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& node = t.nodes[i];
    nlohmann::json j{{"id", i}, {"count", node.count}};
    if (node.is_leaf()) {
      j["leaf"] = true;
      j["value"] = node.value;
    } else {
      j["leaf"] = false;
      j["feature"] = node.feature;
      j["threshold"] = node.threshold;
      j["decrease"] = node.decrease;
      j["left"] = node.left;
      j["right"] = node.right;
    }
    nodes.push_back(std::move(j));
  }
  return nlohmann::json{{"nodes", std::move(nodes)}}.dump();
}

}  // namespace rfsel
