#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rfsel/dataset.hpp"
#include "rfsel/forest.hpp"

namespace rfsel {

struct SelectionConfig {
  std::size_t vi_runs = 50;
  // Forests of the importance step: 2000 trees, mtry = p/3.
  ForestConfig vi_forest{2000, MtryExpr::p_over(3), std::nullopt, RngSeed{}};
  ForestConfig nested_forest;  // forests of the nested and stepwise models
  std::size_t nested_repeats = 25;
  // Interpretation model: smallest k with err(k) <= min err + multiplier * sd(argmin).
  double se_multiplier = 1.0;
  std::size_t curve_min_leaf = 5;
  RngSeed seed;
};

struct Elimination {
  double threshold = 0.0;
  std::vector<std::size_t> kept;       // variables in decreasing importance
  std::vector<double> sd_curve_fit;    // fitted sd by rank (rank 1 first)
};

struct NestedCurve {
  std::vector<double> mean;  // mean[k-1]: error of the model on the first k variables
  std::vector<double> sd;
  std::vector<std::vector<double>> runs;  // runs[k-1][r]: error of repeat r
};

struct InterpretationResult {
  std::vector<std::size_t> variables;
  NestedCurve curve;
  std::size_t argmin_size = 0;  // model size with the smallest mean error
};

struct StepRecord {
  std::size_t candidate = 0;
  double error = 0.0;
  double error_sd = 0.0;
  bool accepted = false;
};

struct PredictionResult {
  std::vector<std::size_t> variables;  // in acceptance order
  double threshold = 0.0;
  std::vector<StepRecord> steps;       // first entry is the starting variable
};

struct SelectionResult {
  ImportanceReport report;
  double threshold = 0.0;
  std::vector<std::size_t> kept;
  std::vector<double> sd_curve_fit;
  NestedCurve nested;
  std::size_t argmin_size = 0;
  std::vector<std::size_t> interpretation_set;
  std::vector<std::size_t> prediction_set;
  double prediction_threshold = 0.0;
  std::vector<StepRecord> steps;
};

// Ranks variables by mean importance, fits a 1-D regression tree to the
// importance sd in rank order and keeps the variables whose mean importance
// exceeds the smallest fitted value (and zero). Throws DataError when
// nothing survives.
Elimination eliminate_and_rank(const ImportanceReport& report, std::size_t min_leaf = 5);

// Size of the interpretation model for a nested error curve: the smallest k
// whose error is within `multiplier` sds of the minimum (first minimum on
// ties). Returns (k0, argmin size).
std::pair<std::size_t, std::size_t> interpretation_size(std::span<const double> mean,
                                                        std::span<const double> sd, double multiplier = 1.0);

// Mean absolute first difference of the nested errors past the
// interpretation model: models k0+1 .. m (1-based). Zero when fewer than two
// such models exist.
double stepwise_threshold(std::span<const double> nested_mean, std::size_t interpretation_size);

// Threshold for a repeated nested curve: the single-curve threshold of each
// repeat's own error sequence, averaged over repeats. Falls back to the mean
// curve when no per-repeat errors are stored.
double stepwise_threshold(const NestedCurve& nested, std::size_t interpretation_size);

InterpretationResult interpretation_step(const Dataset& d, std::span<const std::size_t> kept,
                                         const SelectionConfig& cfg);

PredictionResult prediction_step(const Dataset& d, std::span<const std::size_t> interpretation_set,
                                 const NestedCurve& nested, const SelectionConfig& cfg);

SelectionResult select_variables(const Dataset& d, const SelectionConfig& cfg);

}  // namespace rfsel
