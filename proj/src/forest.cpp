#include "rfsel/forest.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rfsel/error.hpp"
#include "rfsel/parallel.hpp"

namespace rfsel {

std::size_t resolve_mtry(const ForestConfig& cfg, std::size_t p, const Task& task) {
  if (cfg.mtry) return cfg.mtry->resolve(p);
  return task.is_classification() ? MtryExpr::sqrt_p().resolve(p) : MtryExpr::p_over(3).resolve(p);
}

std::size_t resolve_nodesize(const ForestConfig& cfg, const Task& task) {
  const std::size_t size = cfg.nodesize.value_or(default_nodesize(task));
  if (size < 1) throw ConfigError("nodesize must be at least 1");
  return size;
}

RngSeed tree_seed(RngSeed forest_seed, std::size_t index) {
  return derive_seed(forest_seed, {stream::kTree, index});
}

double Forest::predict(const Dataset& d, std::size_t row) const {
  return predict_with([&](std::size_t f) { return d.value(row, f); });
}

std::vector<double> Forest::predict(const Dataset& d) const {
  if (d.num_features() != num_features) {
    throw ConfigError(fmt::format("forest expects {} features, dataset has {}", num_features, d.num_features()));
  }
  std::vector<double> out(d.num_rows());
  parallel_for(d.num_rows(), [&](std::size_t i) { out[i] = predict(d, i); });
  return out;
}

std::vector<std::size_t> oob_rows(const Tree& t, std::size_t n) {
  std::vector<std::uint8_t> in_bag(n, 0);
  for (std::uint32_t r : t.bootstrap) in_bag[r] = 1;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_bag[i]) rows.push_back(i);
  }
  return rows;
}

double prediction_error(const Dataset& d, std::span<const double> predictions) {
  if (predictions.size() != d.num_rows()) throw ConfigError("prediction count does not match dataset");
  if (d.num_rows() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    if (d.task().is_classification()) {
      acc += predictions[i] != d.response(i) ? 1.0 : 0.0;
    } else {
      const double diff = predictions[i] - d.response(i);
      acc += diff * diff;
    }
  }
  return acc / static_cast<double>(d.num_rows());
}

Forest fit_forest(const Dataset& d, const ForestConfig& cfg) {
  if (cfg.ntree < 1) throw ConfigError("ntree must be at least 1");
  const std::size_t n = d.num_rows();
  const std::size_t p = d.num_features();
  const Task& task = d.task();

  Forest forest;
  forest.config = cfg;
  forest.task = task;
  forest.num_features = p;
  forest.mtry = resolve_mtry(cfg, p, task);
  forest.nodesize = resolve_nodesize(cfg, task);

  TreeConfig tree_cfg{forest.mtry, forest.nodesize, task, cfg.seed};
  const SortedColumns sorted(d);
  forest.trees.resize(cfg.ntree);
  parallel_for(cfg.ntree, [&](std::size_t t) {
    Rng rng = make_rng(tree_seed(cfg.seed, t));
    const auto boot = draw_bootstrap(rng, n);
    forest.trees[t] = grow_tree(d, boot, tree_cfg, rng, &sorted);
  });

  // Ordered reduction over trees keeps the aggregate schedule-independent.
  const std::size_t classes = task.num_classes;
  std::vector<std::size_t> votes(task.is_classification() ? n * classes : 0, 0);
  std::vector<double> sums(n, 0.0);
  forest.oob_votes.assign(n, 0);
  std::vector<std::uint8_t> in_bag(n);
  for (const Tree& tree : forest.trees) {
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (std::uint32_t r : tree.bootstrap) in_bag[r] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      const double pred = predict_tree(tree, d, i);
      ++forest.oob_votes[i];
      if (task.is_classification()) {
        ++votes[i * classes + static_cast<std::size_t>(pred)];
      } else {
        sums[i] += pred;
      }
    }
  }

  forest.oob_prediction.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> class_errors(classes, 0.0);
  std::vector<double> class_seen(classes, 0.0);
  double err = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (forest.oob_votes[i] == 0) {
      ++forest.never_oob;
      continue;
    }
    ++covered;
    if (task.is_classification()) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c) {
        if (votes[i * classes + c] > votes[i * classes + best]) best = c;
      }
      forest.oob_prediction[i] = static_cast<double>(best);
      const bool wrong = best != d.label(i);
      err += wrong ? 1.0 : 0.0;
      class_seen[d.label(i)] += 1.0;
      class_errors[d.label(i)] += wrong ? 1.0 : 0.0;
    } else {
      forest.oob_prediction[i] = sums[i] / static_cast<double>(forest.oob_votes[i]);
      const double diff = forest.oob_prediction[i] - d.response(i);
      err += diff * diff;
    }
  }
  forest.oob_error = covered > 0 ? err / static_cast<double>(covered) : std::numeric_limits<double>::quiet_NaN();
  if (task.is_classification()) {
    forest.per_class_error.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      forest.per_class_error[c] = class_seen[c] > 0 ? class_errors[c] / class_seen[c] : 0.0;
    }
  }
  return forest;
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ErrorSummary oob_error_mean(const Dataset& d, const ForestConfig& cfg, std::size_t repeats) {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  std::vector<double> errors(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    ForestConfig run = cfg;
    run.seed = derive_seed(cfg.seed, {stream::kRun, r});
    errors[r] = fit_forest(d, run).oob_error;
  }
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(repeats);
  const double sd = sample_sd(errors);
  return {mean, sd, std::move(errors)};
}

}  // namespace rfsel
