#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rfsel/cart.hpp"
#include "rfsel/dataset.hpp"
#include "rfsel/mtry_expr.hpp"
#include "rfsel/rng.hpp"

namespace rfsel {

struct ForestConfig {
  std::size_t ntree = 500;
  // Unset: floor(sqrt(p)) for classification, floor(p/3) for regression.
  std::optional<MtryExpr> mtry;
  // Unset: default_nodesize(task).
  std::optional<std::size_t> nodesize;
  RngSeed seed;
};

std::size_t resolve_mtry(const ForestConfig& cfg, std::size_t p, const Task& task);
std::size_t resolve_nodesize(const ForestConfig& cfg, const Task& task);

// Seed of tree `index`'s stream: its bootstrap is drawn first, then the
// node feature subsets.
RngSeed tree_seed(RngSeed forest_seed, std::size_t index);

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  std::size_t mtry = 0;
  std::size_t nodesize = 0;
  Task task;
  std::size_t num_features = 0;

  // Aggregated out-of-bag prediction per observation; NaN when the
  // observation was in every bootstrap.
  std::vector<double> oob_prediction;
  std::vector<std::size_t> oob_votes;  // number of trees for which the row was OOB
  // Misclassification rate or MSE over observations with at least one OOB tree.
  double oob_error = 0.0;
  std::size_t never_oob = 0;
  // Classification only: error rate among OOB-predicted rows of each class.
  std::vector<double> per_class_error;

  // Majority vote (ties to the lowest class id) or mean of tree predictions.
  template <typename FeatureFn>
  double predict_with(FeatureFn&& feature) const;

  double predict(const Dataset& d, std::size_t row) const;
  std::vector<double> predict(const Dataset& d) const;
};

Forest fit_forest(const Dataset& d, const ForestConfig& cfg);

// Observations absent from the tree's bootstrap, ascending.
std::vector<std::size_t> oob_rows(const Tree& t, std::size_t n);

// Misclassification rate or mean squared error of predictions against d.
double prediction_error(const Dataset& d, std::span<const double> predictions);

struct ErrorSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 when repeats == 1
  std::vector<double> runs;  // per-forest OOB errors, in repeat order
};

// `repeats` forests with seeds derived from cfg.seed; mean and sd of their
// OOB errors.
ErrorSummary oob_error_mean(const Dataset& d, const ForestConfig& cfg, std::size_t repeats = 10);

// Permutation of 0..size-1 used for variable `variable` on the OOB sample
// of tree `tree`, repetition `rep`.
std::vector<std::size_t> oob_permutation(RngSeed seed, std::size_t tree, std::size_t variable,
                                         std::size_t rep, std::size_t size);

// Raw mean decrease in accuracy (increase in MSE for regression): for each
// tree, the OOB error after permuting a variable within the OOB sample
// minus the plain OOB error, averaged over permutations and over trees
// with a non-empty OOB sample.
std::vector<double> permutation_importance(const Forest& f, const Dataset& d, std::size_t n_perm,
                                           RngSeed seed);

struct ImportanceReport {
  std::vector<double> mean_vi;
  std::vector<double> sd_vi;
  std::size_t runs = 0;
  // Variables by decreasing mean VI, ties to the lower index.
  std::vector<std::size_t> ranking;
  // runs x p matrix of the individual forests' importances.
  std::vector<std::vector<double>> per_run;
  std::vector<double> oob_errors;
};

std::vector<std::size_t> rank_by_importance(std::span<const double> mean_vi);

// Importances of `runs` independent forests (one permutation each).
ImportanceReport importance_report(const Dataset& d, const ForestConfig& cfg, std::size_t runs = 50);

double sample_sd(std::span<const double> values);

template <typename FeatureFn>
double Forest::predict_with(FeatureFn&& feature) const {
  if (task.is_classification()) {
    std::vector<std::size_t> votes(task.num_classes, 0);
    for (const auto& t : trees) ++votes[static_cast<std::size_t>(t.predict_with(feature))];
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) best = c;
    }
    return static_cast<double>(best);
  }
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict_with(feature);
  return sum / static_cast<double>(trees.size());
}

}  // namespace rfsel
