#include "rfsel/select.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rfsel/error.hpp"

namespace rfsel {

Elimination eliminate_and_rank(const ImportanceReport& report, std::size_t min_leaf) {
  const std::size_t p = report.mean_vi.size();
  if (p == 0) throw DataError("empty importance report");
  if (report.runs < 2) throw ConfigError("elimination needs an importance report from at least 2 runs");

  std::vector<double> sds(p);
  for (std::size_t r = 0; r < p; ++r) sds[r] = report.sd_vi[report.ranking[r]];

  Elimination out;
  out.sd_curve_fit = p >= 2 ? fit_1d_curve_tree(sds, min_leaf) : sds;
  out.threshold = *std::min_element(out.sd_curve_fit.begin(), out.sd_curve_fit.end());
  for (std::size_t v : report.ranking) {
    const double vi = report.mean_vi[v];
    if (vi > out.threshold && vi > 0.0) out.kept.push_back(v);
  }
  if (out.kept.empty()) {
    throw DataError(
        "no variable has importance above the elimination threshold; "
        "try a larger ntree or mtry for the importance forests");
  }
  return out;
}

std::pair<std::size_t, std::size_t> interpretation_size(std::span<const double> mean,
                                                        std::span<const double> sd, double multiplier) {
  if (mean.empty() || mean.size() != sd.size()) throw ConfigError("nested error curve is empty or ragged");
  const std::size_t argmin =
      static_cast<std::size_t>(std::min_element(mean.begin(), mean.end()) - mean.begin());
  const double bound = mean[argmin] + multiplier * sd[argmin];
  std::size_t k0 = argmin;
  for (std::size_t k = 0; k <= argmin; ++k) {
    if (mean[k] <= bound) {
      k0 = k;
      break;
    }
  }
  return {k0 + 1, argmin + 1};
}

double stepwise_threshold(std::span<const double> nested_mean, std::size_t interpretation_size) {
  const std::size_t m = nested_mean.size();
  // Models k0+1 .. m occupy 0-based indices k0 .. m-1.
  if (interpretation_size + 2 > m) return 0.0;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t j = interpretation_size; j + 1 < m; ++j) {
    acc += std::abs(nested_mean[j + 1] - nested_mean[j]);
    ++count;
  }
  return acc / static_cast<double>(count);
}

double stepwise_threshold(const NestedCurve& nested, std::size_t interpretation_size) {
  if (nested.runs.empty()) return stepwise_threshold(nested.mean, interpretation_size);
  if (nested.runs.size() != nested.mean.size()) throw ConfigError("nested error runs do not match the curve");
  const std::size_t repeats = nested.runs[0].size();
  if (repeats == 0) throw ConfigError("nested error runs are empty");
  std::vector<double> curve(nested.runs.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
      if (nested.runs[k].size() != repeats) throw ConfigError("nested error runs are ragged");
      curve[k] = nested.runs[k][r];
    }
    acc += stepwise_threshold(curve, interpretation_size);
  }
  return acc / static_cast<double>(repeats);
}

InterpretationResult interpretation_step(const Dataset& d, std::span<const std::size_t> kept,
                                         const SelectionConfig& cfg) {
  if (kept.empty()) throw ConfigError("interpretation step needs at least one kept variable");
  if (cfg.nested_repeats < 2) throw ConfigError("nested_repeats must be at least 2");

  InterpretationResult out;
  const std::size_t m = kept.size();
  out.curve.mean.resize(m);
  out.curve.sd.resize(m);
  out.curve.runs.resize(m);
  for (std::size_t k = 1; k <= m; ++k) {
    const Dataset sub = d.select_features(kept.first(k));
    ForestConfig fc = cfg.nested_forest;
    fc.seed = derive_seed(cfg.seed, {stream::kNested, k});
    const ErrorSummary e = oob_error_mean(sub, fc, cfg.nested_repeats);
    out.curve.mean[k - 1] = e.mean;
    out.curve.sd[k - 1] = e.sd;
    out.curve.runs[k - 1] = e.runs;
  }
  const auto [k0, argmin] = interpretation_size(out.curve.mean, out.curve.sd, cfg.se_multiplier);
  out.argmin_size = argmin;
  out.variables.assign(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(k0));
  return out;
}

PredictionResult prediction_step(const Dataset& d, std::span<const std::size_t> interpretation_set,
                                 const NestedCurve& nested, const SelectionConfig& cfg) {
  if (interpretation_set.empty()) throw ConfigError("prediction step needs a non-empty interpretation set");
  if (nested.mean.size() < interpretation_set.size()) {
    throw ConfigError("nested error curve is shorter than the interpretation set");
  }
  if (cfg.nested_repeats < 2) throw ConfigError("nested_repeats must be at least 2");

  PredictionResult out;
  out.threshold = stepwise_threshold(nested, interpretation_set.size());
  out.variables.push_back(interpretation_set[0]);
  double current = nested.mean[0];
  out.steps.push_back({interpretation_set[0], nested.mean[0], nested.sd[0], true});

  for (std::size_t i = 1; i < interpretation_set.size(); ++i) {
    std::vector<std::size_t> trial = out.variables;
    trial.push_back(interpretation_set[i]);
    const Dataset sub = d.select_features(trial);
    ForestConfig fc = cfg.nested_forest;
    fc.seed = derive_seed(cfg.seed, {stream::kStepwise, i});
    const ErrorSummary e = oob_error_mean(sub, fc, cfg.nested_repeats);
    const bool accept = current - e.mean > out.threshold;
    out.steps.push_back({interpretation_set[i], e.mean, e.sd, accept});
    if (accept) {
      out.variables.push_back(interpretation_set[i]);
      current = e.mean;
    }
  }
  return out;
}

SelectionResult select_variables(const Dataset& d, const SelectionConfig& cfg) {
  if (cfg.vi_runs < 2) throw ConfigError("vi_runs must be at least 2");
  if (cfg.nested_repeats < 2) throw ConfigError("nested_repeats must be at least 2");

  SelectionResult out;
  ForestConfig vi_cfg = cfg.vi_forest;
  vi_cfg.seed = derive_seed(cfg.seed, {stream::kImportance});
  out.report = importance_report(d, vi_cfg, cfg.vi_runs);

  Elimination elim = eliminate_and_rank(out.report, cfg.curve_min_leaf);
  out.threshold = elim.threshold;
  out.kept = std::move(elim.kept);
  out.sd_curve_fit = std::move(elim.sd_curve_fit);

  InterpretationResult interp = interpretation_step(d, out.kept, cfg);
  out.nested = std::move(interp.curve);
  out.argmin_size = interp.argmin_size;
  out.interpretation_set = std::move(interp.variables);

  PredictionResult pred = prediction_step(d, out.interpretation_set, out.nested, cfg);
  out.prediction_set = std::move(pred.variables);
  out.prediction_threshold = pred.threshold;
  out.steps = std::move(pred.steps);
  return out;
}

}  // namespace rfsel
