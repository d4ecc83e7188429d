#pragma once

// Slow, independently coded reference implementations used by the unit
// and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "rfsel/cart.hpp"
#include "rfsel/dataset.hpp"
#include "rfsel/forest.hpp"
#include "rfsel/rng.hpp"

namespace oracle {

struct Node {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  double value = 0.0;
  double decrease = 0.0;
  std::size_t count = 0;
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root
};

// Exhaustive CART with every feature a candidate at every node. Split
// scores are compared exactly in integer arithmetic, so regression
// responses must be multiples of 1/4. Exact ties go to the lowest feature,
// then the lowest threshold.
Tree grow_cart(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows, std::size_t nodesize);

// Best split of `rows` over all features, or a leaf node when none has a
// positive decrease.
Node best_split(const rfsel::Dataset& d, const std::vector<std::uint32_t>& rows);

double predict(const Tree& t, const std::vector<double>& x);

// Empty when equal; otherwise a description of the first difference.
std::string compare(const rfsel::Tree& impl, const Tree& expected);

struct Bagging {
  std::vector<Tree> trees;
  std::vector<std::vector<std::uint32_t>> bootstraps;
};

// Bootstraps drawn from the per-tree seeds of `seed` with n uniform draws
// each, one exhaustive CART per bootstrap.
Bagging bagging(const rfsel::Dataset& d, std::size_t ntree, rfsel::RngSeed seed, std::size_t nodesize);

// Majority vote (ties to the lowest class) or mean of the trees.
double bagging_predict(const Bagging& b, const rfsel::Task& task, const std::vector<double>& x);

// Permutation importance from explicitly permuted OOB matrices, one
// permutation per (tree, variable).
std::vector<double> brute_force_vi(const rfsel::Forest& f, const rfsel::Dataset& d, rfsel::RngSeed seed);

// Recursive 1-D regression tree by direct enumeration of every cut.
std::vector<double> curve_tree(const std::vector<double>& ys, std::size_t min_leaf);

std::vector<double> row_of(const rfsel::Dataset& d, std::size_t row);

}  // namespace oracle
