#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rfsel/dataset.hpp"
#include "rfsel/rng.hpp"

namespace rfsel {

struct FriedmanConfig {
  int variant = 1;  // 1, 2 or 3
  std::size_t n = 100;
  std::size_t p = 10;
  // Unset means the variant's default: 1 for Friedman1, 125 for Friedman2
  // and 0.1 for Friedman3 (roughly 3:1 signal-to-noise for the latter two).
  std::optional<double> noise_sd;
  RngSeed seed;
};

struct ToysConfig {
  std::size_t n = 100;
  std::size_t p = 200;
  RngSeed seed;
};

struct ReplicateSpec {
  std::size_t source_variable = 0;  // 0-based column index
  std::size_t count = 1;
  double correlation = 0.9;
};

double friedman1_response(double x1, double x2, double x3, double x4, double x5);
double friedman2_response(double x1, double x2, double x3, double x4);
double friedman3_response(double x1, double x2, double x3, double x4);
double default_noise_sd(int variant);

// Friedman1: p i.i.d. U[0,1] columns, only the first 5 enter the response.
Dataset gen_friedman1(const FriedmanConfig& cfg);

// Friedman2/3: four true inputs on their standard ranges followed by
// U[0,1] nuisance columns up to p.
Dataset gen_friedman23(const FriedmanConfig& cfg);

// Dispatches on cfg.variant.
Dataset gen_friedman(const FriedmanConfig& cfg);

// Two-class "toys" model: six informative variables in two groups of
// three, the rest N(0,1) noise. Labels -1/+1 are stored as classes 0/1.
// Every column is standardized to mean 0, variance 1 after simulation.
Dataset gen_toys(const ToysConfig& cfg);

// Toys features before standardization, used by tests of the mixture model.
Dataset gen_toys_raw(const ToysConfig& cfg);

// Appends correlated copies of source columns. Replicates of all specs are
// inserted as one block starting at column `insert_at` (default: after the
// six true toys variables), spec by spec. A replicate that lands at 1-based
// position i and copies 1-based variable j is named "i^j".
Dataset add_replicates(const Dataset& d, const std::vector<ReplicateSpec>& specs, RngSeed seed,
                       std::size_t insert_at = 6);

// Shifts to sample mean 0 and sample (n-1) variance 1. Constant columns
// are only centered.
void standardize(std::vector<double>& column);

// 0-based indices of the columns that drive the response of a generator.
std::vector<std::size_t> true_variables_friedman(int variant);
std::vector<std::size_t> true_variables_toys();

}  // namespace rfsel
