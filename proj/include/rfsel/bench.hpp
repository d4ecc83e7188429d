#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rfsel/dataset.hpp"
#include "rfsel/forest.hpp"
#include "rfsel/mtry_expr.hpp"
#include "rfsel/rng.hpp"
#include "rfsel/select.hpp"
#include "rfsel/synth.hpp"

namespace rfsel {

struct GeneratorSpec {
  enum class Kind { Toys, Friedman1, Friedman2, Friedman3 };
  Kind kind = Kind::Toys;
  std::size_t n = 100;
  std::size_t p = 200;
  std::optional<double> noise_sd;  // Friedman only
  // Correlated copies, inserted right after the generator's true variables.
  std::vector<ReplicateSpec> replicates;
};

GeneratorSpec::Kind parse_generator_kind(const std::string& name);
std::string to_string(GeneratorSpec::Kind kind);

struct CsvSource {
  std::filesystem::path path;
  Task::Kind task = Task::Kind::Classification;
  std::string response_column;
};

using DataSource = std::variant<GeneratorSpec, CsvSource>;

struct LoadedSource {
  Dataset data;
  std::optional<CsvMetadata> metadata;  // CSV sources only
  // 0-based columns driving the response (generators only).
  std::vector<std::size_t> true_variables;
};

// Draws a generator dataset; replicates use a stream derived from `seed`.
LoadedSource draw_generator(const GeneratorSpec& g, RngSeed seed);

// Generators draw from derive_seed(seed, {kData}); CSV sources ignore the seed.
LoadedSource load_source(const DataSource& source, RngSeed seed);

// ---------------------------------------------------------------- sweep

struct SweepSpec {
  std::vector<MtryExpr> mtry_grid;
  std::vector<std::size_t> ntree_grid;
  std::size_t repeats = 10;
  std::optional<std::size_t> nodesize;
  RngSeed seed;
};

struct SweepCell {
  std::string mtry_expr;  // first grid expression with this value
  std::size_t mtry_value = 0;
  std::size_t ntree = 0;
  double mean = 0.0;
  double sd = 0.0;
};

// One cell per (ntree, distinct mtry value), in grid order. A cell's seed
// depends only on its (mtry value, ntree), so sub-grids reproduce the
// corresponding cells of a larger grid.
std::vector<SweepCell> run_sweep(const Dataset& d, const SweepSpec& s);

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

// ---------------------------------------------------------------- VI study

struct ViStudyCell {
  std::size_t n = 0;
  std::size_t p = 0;
  MtryExpr mtry = MtryExpr::sqrt_p();
  std::size_t ntree = 500;
};

struct ViStudySpec {
  GeneratorSpec generator;  // n and p are taken from each cell
  std::vector<ViStudyCell> cells;
  std::size_t runs = 50;
  std::size_t top_count = 16;  // report the first top_count variables
  RngSeed seed;
};

struct VariableSummary {
  std::size_t variable = 0;  // 0-based column
  std::string name;
  std::size_t rank = 0;  // 1-based rank by mean VI
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct ViStudyResult {
  ViStudyCell cell;
  std::size_t mtry_value = 0;
  ImportanceReport report;
  std::vector<VariableSummary> variables;
};

// Linear-interpolation sample quantile (R's type 7).
double quantile(std::vector<double> values, double prob);

// Summaries of the first `top_count` columns of a report.
std::vector<VariableSummary> summarize_importance(const ImportanceReport& report,
                                                  const std::vector<std::string>& names,
                                                  std::size_t top_count);

// Datasets are shared by cells with the same (n, p).
std::vector<ViStudyResult> run_vi_study(const ViStudySpec& s);

// The same study on a fixed dataset; cells' n and p are overwritten with
// the dataset's and the generator is ignored.
std::vector<ViStudyResult> run_vi_study(const Dataset& d, const ViStudySpec& s);

void write_vi_study_csv(std::ostream& out, const std::vector<ViStudyResult>& results);

// ---------------------------------------------------------------- evaluation

struct SetErrors {
  double all = 0.0;
  double interpretation = 0.0;
  double prediction = 0.0;
};

struct TrainTestResult {
  SelectionResult selection;
  SetErrors test_error;
};

// Test error of a forest fitted on `train` restricted to `features`.
double subset_test_error(const Dataset& train, const Dataset& test, const std::vector<std::size_t>& features,
                         const ForestConfig& forest);

// Selects on `train`, then scores forests on all variables, the
// interpretation set and the prediction set against `test`.
TrainTestResult run_train_test_eval(const Dataset& train, const Dataset& test, const SelectionConfig& selection,
                                    const ForestConfig& eval_forest, RngSeed seed);

// Generator flavour: draws the training set from derive_seed(seed, {kData})
// and an independent test set of the same size from
// derive_seed(seed, {kTestData}).
TrainTestResult run_train_test_eval(const GeneratorSpec& g, const SelectionConfig& selection,
                                    const ForestConfig& eval_forest, RngSeed seed);

struct CvSpec {
  std::size_t folds = 5;
  SelectionConfig selection;
  ForestConfig eval_forest;
  RngSeed seed;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t test_size = 0;
  std::vector<std::size_t> interpretation_set;
  std::vector<std::size_t> prediction_set;
  SetErrors test_error;
};

struct CvReport {
  std::vector<FoldResult> folds;
  SetErrors error;  // fold errors weighted by test size
  double mean_interpretation_size = 0.0;
  double mean_prediction_size = 0.0;
  std::vector<std::string> warnings;
};

CvReport run_cv_selection(const Dataset& d, const CvSpec& c);

void write_cv_csv(std::ostream& out, const CvReport& report);

}  // namespace rfsel
