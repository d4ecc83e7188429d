#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "rfsel/error.hpp"
#include "rfsel/forest.hpp"
#include "rfsel/parallel.hpp"

namespace rfsel {

std::vector<std::size_t> oob_permutation(RngSeed seed, std::size_t tree, std::size_t variable,
                                         std::size_t rep, std::size_t size) {
  Rng rng = make_rng(derive_seed(seed, {stream::kPermutation, tree, variable, rep}));
  std::vector<std::size_t> perm(size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

namespace {

struct TreeContribution {
  bool has_oob = false;
  std::vector<std::pair<std::size_t, double>> deltas;  // (variable, err_perm - err)
};

double loss(const Task& task, double prediction, double truth) {
  if (task.is_classification()) return prediction != truth ? 1.0 : 0.0;
  const double diff = prediction - truth;
  return diff * diff;
}

}  // namespace

std::vector<double> permutation_importance(const Forest& f, const Dataset& d, std::size_t n_perm,
                                           RngSeed seed) {
  if (n_perm < 1) throw ConfigError("n_perm must be at least 1");
  if (d.num_features() != f.num_features) {
    throw ConfigError("dataset does not match the forest's feature count");
  }
  const std::size_t n = d.num_rows();
  const std::size_t p = d.num_features();
  const Task& task = d.task();

  std::vector<TreeContribution> per_tree(f.trees.size());
  parallel_for(f.trees.size(), [&](std::size_t t) {
    const Tree& tree = f.trees[t];
    const auto oob = oob_rows(tree, n);
    if (oob.empty()) return;
    TreeContribution& out = per_tree[t];
    out.has_oob = true;
    const double size = static_cast<double>(oob.size());

    double base = 0.0;
    for (std::size_t row : oob) base += loss(task, predict_tree(tree, d, row), d.response(row));
    base /= size;

    for (std::size_t v : tree.used_features()) {
      double acc = 0.0;
      for (std::size_t rep = 0; rep < n_perm; ++rep) {
        const auto perm = oob_permutation(seed, t, v, rep, oob.size());
        double permuted = 0.0;
        for (std::size_t o = 0; o < oob.size(); ++o) {
          const std::size_t row = oob[o];
          const double swapped = d.value(oob[perm[o]], v);
          const double pred = tree.predict_with(
              [&](std::size_t feature) { return feature == v ? swapped : d.value(row, feature); });
          permuted += loss(task, pred, d.response(row));
        }
        acc += permuted / size - base;
      }
      out.deltas.emplace_back(v, acc / static_cast<double>(n_perm));
    }
  });

  std::vector<double> vi(p, 0.0);
  std::size_t counted = 0;
  for (const auto& contribution : per_tree) {
    if (!contribution.has_oob) continue;
    ++counted;
    for (const auto& [v, delta] : contribution.deltas) vi[v] += delta;
  }
  if (counted > 0) {
    for (double& v : vi) v /= static_cast<double>(counted);
  }
  return vi;
}

std::vector<std::size_t> rank_by_importance(std::span<const double> mean_vi) {
  std::vector<std::size_t> ranking(mean_vi.size());
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&](std::size_t a, std::size_t b) { return mean_vi[a] > mean_vi[b]; });
  return ranking;
}

ImportanceReport importance_report(const Dataset& d, const ForestConfig& cfg, std::size_t runs) {
  if (runs < 2) throw ConfigError(fmt::format("importance report needs at least 2 runs, got {}", runs));
  const std::size_t p = d.num_features();
  ImportanceReport report;
  report.runs = runs;
  for (std::size_t r = 0; r < runs; ++r) {
    ForestConfig run = cfg;
    run.seed = derive_seed(cfg.seed, {stream::kRun, r});
    const Forest forest = fit_forest(d, run);
    report.oob_errors.push_back(forest.oob_error);
    report.per_run.push_back(
        permutation_importance(forest, d, 1, derive_seed(cfg.seed, {stream::kImportance, r})));
  }

  report.mean_vi.assign(p, 0.0);
  report.sd_vi.assign(p, 0.0);
  std::vector<double> column(runs);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t r = 0; r < runs; ++r) column[r] = report.per_run[r][j];
    report.mean_vi[j] = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(runs);
    report.sd_vi[j] = sample_sd(column);
  }
  report.ranking = rank_by_importance(report.mean_vi);
  return report;
}

}  // namespace rfsel
