#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfsel/dataset.hpp"
#include "rfsel/rng.hpp"

namespace rfsel {

struct TreeConfig {
  std::size_t mtry = 1;
  std::size_t nodesize = 1;
  Task task;
  RngSeed seed;
};

// 1 for classification, 5 for regression.
std::size_t default_nodesize(const Task& task);

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;     // leaf prediction: class id or mean response
  double decrease = 0.0;  // impurity decrease of the split (internal nodes)
  std::uint32_t count = 0;  // bootstrap draws reaching the node

  bool is_leaf() const { return feature == kLeaf; }
};

class Tree {
 public:
  std::vector<TreeNode> nodes;
  // Rows drawn for this tree, with repetition.
  std::vector<std::uint32_t> bootstrap;

  // `feature(f)` returns the observation's value of feature f.
  template <typename FeatureFn>
  double predict_with(FeatureFn&& feature) const {
    std::uint32_t id = 0;
    for (;;) {
      const TreeNode& node = nodes[id];
      if (node.is_leaf()) return node.value;
      id = feature(static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
    }
  }

  std::size_t leaf_count() const;
  std::size_t depth() const;

  // Distinct features used by any split, ascending.
  std::vector<std::size_t> used_features() const;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  // Weighted Gini decrease (classification) or sum-of-squares decrease
  // (regression). Always strictly positive.
  double decrease = 0.0;
  std::size_t left_count = 0;
};

// Exhaustive CART split search among `candidate_features` for the rows
// (a multiset of row indices) of `d`. Thresholds are midpoints between
// consecutive distinct values. Ties are broken toward the lowest feature
// index, then the lowest threshold; two scores within a relative 1e-12 of
// each other count as tied. Returns nothing when no candidate admits a
// split with positive decrease.
std::optional<SplitCandidate> best_split(std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidate_features,
                                         const Dataset& d);

// Per-feature row orders of a dataset (ascending value, ties by row index).
// Computing it once lets many trees share the sort.
class SortedColumns {
 public:
  explicit SortedColumns(const Dataset& d);
  std::span<const std::uint32_t> order(std::size_t feature) const {
    return {orders_.data() + feature * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint32_t> orders_;
};

std::vector<std::uint32_t> draw_bootstrap(Rng& rng, std::size_t n);

// Grows a maximal CART tree on the bootstrap multiset. At every node a
// fresh subset of cfg.mtry features is drawn without replacement from
// `rng`; nodes are expanded depth-first, left child first. A node becomes
// a leaf when it is pure, holds at most cfg.nodesize draws, or no sampled
// feature admits a split.
Tree grow_tree(const Dataset& d, std::span<const std::uint32_t> bootstrap, const TreeConfig& cfg,
               Rng& rng, const SortedColumns* sorted = nullptr);

// Convenience overload drawing node subsets from cfg.seed.
Tree grow_tree(const Dataset& d, std::span<const std::uint32_t> bootstrap, const TreeConfig& cfg);

double predict_tree(const Tree& t, std::span<const double> x);
double predict_tree(const Tree& t, const Dataset& d, std::size_t row);

// Node array with explicit child indices.
std::string tree_to_json(const Tree& t);

// Piecewise-constant 1-D regression tree on (rank, value) pairs, ranks
// 1..m. A split is allowed only if both sides keep at least `min_leaf`
// points and it strictly lowers the sum of squares. Returns the fitted
// value at each rank.
std::vector<double> fit_1d_curve_tree(std::span<const double> ys, std::size_t min_leaf = 5);

}  // namespace rfsel
