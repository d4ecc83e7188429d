#include "rfsel/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rfsel/error.hpp"

namespace rfsel {

GeneratorSpec::Kind parse_generator_kind(const std::string& name) {
  if (name == "toys") return GeneratorSpec::Kind::Toys;
  if (name == "friedman1") return GeneratorSpec::Kind::Friedman1;
  if (name == "friedman2") return GeneratorSpec::Kind::Friedman2;
  if (name == "friedman3") return GeneratorSpec::Kind::Friedman3;
  throw ConfigError(fmt::format("unknown generator '{}' (expected toys, friedman1, friedman2 or friedman3)", name));
}

std::string to_string(GeneratorSpec::Kind kind) {
  switch (kind) {
    case GeneratorSpec::Kind::Toys: return "toys";
    case GeneratorSpec::Kind::Friedman1: return "friedman1";
    case GeneratorSpec::Kind::Friedman2: return "friedman2";
    case GeneratorSpec::Kind::Friedman3: return "friedman3";
  }
  return "unknown";
}

LoadedSource draw_generator(const GeneratorSpec& g, RngSeed seed) {
  LoadedSource out;
  std::size_t true_block = 0;
  if (g.kind == GeneratorSpec::Kind::Toys) {
    if (g.noise_sd) throw ConfigError("noise_sd does not apply to the toys generator");
    out.data = gen_toys({g.n, g.p, seed});
    out.true_variables = true_variables_toys();
    true_block = 6;
  } else {
    const int variant = g.kind == GeneratorSpec::Kind::Friedman1 ? 1 : g.kind == GeneratorSpec::Kind::Friedman2 ? 2 : 3;
    out.data = gen_friedman({variant, g.n, g.p, g.noise_sd, seed});
    out.true_variables = true_variables_friedman(variant);
    true_block = out.true_variables.size();
  }
  if (!g.replicates.empty()) {
    out.data = add_replicates(out.data, g.replicates, derive_seed(seed, {stream::kReplicate}), true_block);
  }
  return out;
}

LoadedSource load_source(const DataSource& source, RngSeed seed) {
  if (const auto* g = std::get_if<GeneratorSpec>(&source)) {
    return draw_generator(*g, derive_seed(seed, {stream::kData}));
  }
  const auto& csv = std::get<CsvSource>(source);
  LoadedCsv loaded = load_csv(csv.path, csv.task, csv.response_column);
  LoadedSource out{std::move(loaded.dataset), std::move(loaded.metadata), {}};
  return out;
}

// ---------------------------------------------------------------- sweep

std::vector<SweepCell> run_sweep(const Dataset& d, const SweepSpec& s) {
  if (s.mtry_grid.empty()) throw ConfigError("mtry grid is empty");
  if (s.ntree_grid.empty()) throw ConfigError("ntree grid is empty");
  if (s.repeats < 1) throw ConfigError("repeats must be at least 1");
  const std::size_t p = d.num_features();

  std::vector<std::pair<std::string, std::size_t>> mtrys;
  std::set<std::size_t> seen;
  for (const auto& e : s.mtry_grid) {
    const std::size_t v = e.resolve_strict(p);
    if (seen.insert(v).second) mtrys.emplace_back(e.label(), v);
  }
  for (std::size_t nt : s.ntree_grid) {
    if (nt < 1) throw ConfigError("ntree values must be at least 1");
  }

  std::vector<SweepCell> cells;
  for (std::size_t nt : s.ntree_grid) {
    for (const auto& [label, v] : mtrys) {
      ForestConfig cfg;
      cfg.ntree = nt;
      cfg.mtry = MtryExpr::constant(static_cast<double>(v));
      cfg.nodesize = s.nodesize;
      cfg.seed = derive_seed(s.seed, {stream::kCell, v, nt});
      const ErrorSummary e = oob_error_mean(d, cfg, s.repeats);
      cells.push_back({label, v, nt, e.mean, e.sd});
    }
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "mtry_expr,mtry_value,ntree,mean,sd\n";
  for (const auto& c : cells) {
    fmt::print(out, "{},{},{},{},{}\n", c.mtry_expr, c.mtry_value, c.ntree, c.mean, c.sd);
  }
}

// ---------------------------------------------------------------- VI study

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("quantile probability must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<VariableSummary> summarize_importance(const ImportanceReport& report,
                                                  const std::vector<std::string>& names,
                                                  std::size_t top_count) {
  const std::size_t p = report.mean_vi.size();
  std::vector<std::size_t> rank(p);
  for (std::size_t r = 0; r < p; ++r) rank[report.ranking[r]] = r + 1;

  std::vector<VariableSummary> out;
  for (std::size_t v = 0; v < std::min(top_count, p); ++v) {
    std::vector<double> vals;
    vals.reserve(report.per_run.size());
    for (const auto& run : report.per_run) vals.push_back(run[v]);
    VariableSummary s;
    s.variable = v;
    s.name = v < names.size() ? names[v] : fmt::format("X{}", v + 1);
    s.rank = rank[v];
    s.mean = report.mean_vi[v];
    s.sd = report.sd_vi[v];
    s.min = quantile(vals, 0.0);
    s.q1 = quantile(vals, 0.25);
    s.median = quantile(vals, 0.5);
    s.q3 = quantile(vals, 0.75);
    s.max = quantile(vals, 1.0);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

ViStudyResult run_vi_cell(const Dataset& d, const ViStudyCell& cell, const ViStudySpec& s) {
  ViStudyResult r;
  r.cell = cell;
  r.mtry_value = cell.mtry.resolve_strict(d.num_features());
  ForestConfig cfg;
  cfg.ntree = cell.ntree;
  cfg.mtry = MtryExpr::constant(static_cast<double>(r.mtry_value));
  cfg.seed = derive_seed(s.seed, {stream::kCell, cell.n, cell.p, r.mtry_value, cell.ntree});
  r.report = importance_report(d, cfg, s.runs);
  r.variables = summarize_importance(r.report, d.feature_names(), s.top_count);
  return r;
}

void check_vi_spec(const ViStudySpec& s) {
  if (s.cells.empty()) throw ConfigError("VI study grid is empty");
  if (s.runs < 2) throw ConfigError("VI study needs at least 2 runs");
}

}  // namespace

std::vector<ViStudyResult> run_vi_study(const ViStudySpec& s) {
  check_vi_spec(s);
  std::map<std::pair<std::size_t, std::size_t>, Dataset> datasets;
  std::vector<ViStudyResult> out;
  for (const auto& cell : s.cells) {
    const auto key = std::make_pair(cell.n, cell.p);
    auto it = datasets.find(key);
    if (it == datasets.end()) {
      GeneratorSpec g = s.generator;
      g.n = cell.n;
      g.p = cell.p;
      it = datasets.emplace(key, draw_generator(g, derive_seed(s.seed, {stream::kData, cell.n, cell.p})).data)
               .first;
    }
    out.push_back(run_vi_cell(it->second, cell, s));
  }
  return out;
}

std::vector<ViStudyResult> run_vi_study(const Dataset& d, const ViStudySpec& s) {
  check_vi_spec(s);
  std::vector<ViStudyResult> out;
  for (ViStudyCell cell : s.cells) {
    cell.n = d.num_rows();
    cell.p = d.num_features();
    out.push_back(run_vi_cell(d, cell, s));
  }
  return out;
}

void write_vi_study_csv(std::ostream& out, const std::vector<ViStudyResult>& results) {
  out << "n,p,mtry_expr,mtry_value,ntree,variable,name,rank,mean,sd,min,q1,median,q3,max\n";
  for (const auto& r : results) {
    for (const auto& v : r.variables) {
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.cell.n, r.cell.p, r.cell.mtry.label(),
                 r.mtry_value, r.cell.ntree, v.variable + 1, v.name, v.rank, v.mean, v.sd, v.min, v.q1, v.median,
                 v.q3, v.max);
    }
  }
}

// ---------------------------------------------------------------- evaluation

double subset_test_error(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& features,
                         const ForestConfig& forest) {
  if (features.empty()) throw ConfigError("cannot evaluate an empty variable set");
  const Forest f = fit_forest(train.select_features(features), forest);
  const Dataset sub = test.select_features(features);
  return prediction_error(sub, f.predict(sub));
}

namespace {

std::vector<std::size_t> all_features(std::size_t p) {
  std::vector<std::size_t> v(p);
  for (std::size_t i = 0; i < p; ++i) v[i] = i;
  return v;
}

SetErrors evaluate_sets(const Dataset& train, const Dataset& test, const SelectionResult& sel,
                        const ForestConfig& eval_forest, RngSeed seed) {
  ForestConfig cfg = eval_forest;
  SetErrors e;
  cfg.seed = derive_seed(seed, {stream::kEval, 0});
  e.all = subset_test_error(train, test, all_features(train.num_features()), cfg);
  cfg.seed = derive_seed(seed, {stream::kEval, 1});
  e.interpretation = subset_test_error(train, test, sel.interpretation_set, cfg);
  if (sel.prediction_set == sel.interpretation_set) {
    e.prediction = e.interpretation;
  } else {
    cfg.seed = derive_seed(seed, {stream::kEval, 2});
    e.prediction = subset_test_error(train, test, sel.prediction_set, cfg);
  }
  return e;
}

}  // namespace

TrainTestResult run_train_test_eval(const Dataset& train, const Dataset& test, const SelectionConfig& selection,
                                    const ForestConfig& eval_forest, RngSeed seed) {
  if (train.task() != test.task()) throw DataError("training and test sets have different tasks");
  if (train.num_features() != test.num_features()) {
    throw DataError(fmt::format("training set has {} features but test set has {}", train.num_features(),
                                test.num_features()));
  }
  TrainTestResult out;
  SelectionConfig cfg = selection;
  cfg.seed = derive_seed(seed, {stream::kRun});
  out.selection = select_variables(train, cfg);
  out.test_error = evaluate_sets(train, test, out.selection, eval_forest, seed);
  return out;
}

TrainTestResult run_train_test_eval(const GeneratorSpec& g, const SelectionConfig& selection,
                                    const ForestConfig& eval_forest, RngSeed seed) {
  const Dataset train = draw_generator(g, derive_seed(seed, {stream::kData})).data;
  const Dataset test = draw_generator(g, derive_seed(seed, {stream::kTestData})).data;
  return run_train_test_eval(train, test, selection, eval_forest, seed);
}

CvReport run_cv_selection(const Dataset& d, const CvSpec& c) {
  if (c.folds < 2) throw ConfigError("folds must be at least 2");
  CvReport report;
  const std::vector<Split> splits = stratified_folds(d, c.folds, derive_seed(c.seed, {stream::kFold}), &report.warnings);

  double total = 0.0;
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const Split& s = splits[k];
    const Dataset train = d.select_rows(s.train_indices);
    const Dataset test = d.select_rows(s.test_indices);
    if (train.task().is_classification()) {
      const auto counts = train.class_counts();
      if (std::count(counts.begin(), counts.end(), std::size_t{0}) > 0) {
        throw DataError(fmt::format("fold {} leaves a class absent from its training part; use fewer folds", k + 1));
      }
    }
    const RngSeed fold_seed = derive_seed(c.seed, {stream::kFold, k});
    SelectionConfig sel = c.selection;
    sel.seed = derive_seed(fold_seed, {stream::kRun});
    const SelectionResult r = select_variables(train, sel);

    FoldResult f;
    f.fold = k;
    f.test_size = s.test_indices.size();
    f.interpretation_set = r.interpretation_set;
    f.prediction_set = r.prediction_set;
    f.test_error = evaluate_sets(train, test, r, c.eval_forest, fold_seed);

    const double w = static_cast<double>(f.test_size);
    total += w;
    report.error.all += w * f.test_error.all;
    report.error.interpretation += w * f.test_error.interpretation;
    report.error.prediction += w * f.test_error.prediction;
    report.mean_interpretation_size += static_cast<double>(f.interpretation_set.size());
    report.mean_prediction_size += static_cast<double>(f.prediction_set.size());
    report.folds.push_back(std::move(f));
  }
  report.error.all /= total;
  report.error.interpretation /= total;
  report.error.prediction /= total;
  report.mean_interpretation_size /= static_cast<double>(splits.size());
  report.mean_prediction_size /= static_cast<double>(splits.size());
  return report;
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
  out << "fold,test_size,error_all,error_interpretation,error_prediction,interpretation_size,prediction_size\n";
  for (const auto& f : report.folds) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", f.fold + 1, f.test_size, f.test_error.all,
               f.test_error.interpretation, f.test_error.prediction, f.interpretation_set.size(),
               f.prediction_set.size());
  }
  fmt::print(out, "all,{},{},{},{},{},{}\n", [&] {
    std::size_t n = 0;
    for (const auto& f : report.folds) n += f.test_size;
    return n;
  }(), report.error.all, report.error.interpretation, report.error.prediction, report.mean_interpretation_size,
             report.mean_prediction_size);
}

}  // namespace rfsel
