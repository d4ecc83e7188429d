#include "rfsel/synth.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "rfsel/error.hpp"

namespace rfsel {

namespace {

std::vector<std::string> positional_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < p; ++j) names.push_back(fmt::format("X{}", j + 1));
  return names;
}

}  // namespace

double friedman1_response(double x1, double x2, double x3, double x4, double x5) {
  const double pi = std::numbers::pi;
  return 10.0 * std::sin(pi * x1 * x2) + 20.0 * (x3 - 0.5) * (x3 - 0.5) + 10.0 * x4 + 5.0 * x5;
}

double friedman2_response(double x1, double x2, double x3, double x4) {
  const double inner = x2 * x3 - 1.0 / (x2 * x4);
  return std::sqrt(x1 * x1 + inner * inner);
}

double friedman3_response(double x1, double x2, double x3, double x4) {
  return std::atan((x2 * x3 - 1.0 / (x2 * x4)) / x1);
}

double default_noise_sd(int variant) {
  switch (variant) {
    case 1: return 1.0;
    case 2: return 125.0;
    case 3: return 0.1;
    default: throw ConfigError(fmt::format("unknown Friedman variant {}", variant));
  }
}

Dataset gen_friedman1(const FriedmanConfig& cfg) {
  if (cfg.variant != 1) throw ConfigError("gen_friedman1 requires variant 1");
  if (cfg.p < 5) throw ConfigError(fmt::format("Friedman1 needs p >= 5, got {}", cfg.p));
  const double noise_sd = cfg.noise_sd.value_or(default_noise_sd(1));
  if (noise_sd < 0) throw ConfigError("noise_sd must be non-negative");

  const std::size_t n = cfg.n;
  const std::size_t p = cfg.p;
  Rng rng = make_rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> x(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x[j * n + i] = unif(rng);
    const double eps = noise_sd * noise(rng);
    y[i] = friedman1_response(x[i], x[n + i], x[2 * n + i], x[3 * n + i], x[4 * n + i]) + eps;
  }
  return Dataset(std::move(x), std::move(y), positional_names(p), Task::regression());
}

Dataset gen_friedman23(const FriedmanConfig& cfg) {
  if (cfg.variant != 2 && cfg.variant != 3) throw ConfigError("gen_friedman23 requires variant 2 or 3");
  if (cfg.p < 4) throw ConfigError(fmt::format("Friedman{} needs p >= 4, got {}", cfg.variant, cfg.p));
  const double noise_sd = cfg.noise_sd.value_or(default_noise_sd(cfg.variant));
  if (noise_sd < 0) throw ConfigError("noise_sd must be non-negative");

  const std::size_t n = cfg.n;
  const std::size_t p = cfg.p;
  const double pi = std::numbers::pi;
  Rng rng = make_rng(cfg.seed);
  std::uniform_real_distribution<double> u1(0.0, 100.0);
  std::uniform_real_distribution<double> u2(40.0 * pi, 560.0 * pi);
  std::uniform_real_distribution<double> u3(0.0, 1.0);
  std::uniform_real_distribution<double> u4(1.0, 11.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<double> x(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = u1(rng);
    const double x2 = u2(rng);
    const double x3 = u3(rng);
    const double x4 = u4(rng);
    x[i] = x1;
    x[n + i] = x2;
    x[2 * n + i] = x3;
    x[3 * n + i] = x4;
    for (std::size_t j = 4; j < p; ++j) x[j * n + i] = u3(rng);
    const double eps = noise_sd * noise(rng);
    const double signal = cfg.variant == 2 ? friedman2_response(x1, x2, x3, x4)
                                           : friedman3_response(x1, x2, x3, x4);
    y[i] = signal + eps;
  }
  return Dataset(std::move(x), std::move(y), positional_names(p), Task::regression());
}

Dataset gen_friedman(const FriedmanConfig& cfg) {
  return cfg.variant == 1 ? gen_friedman1(cfg) : gen_friedman23(cfg);
}

void standardize(std::vector<double>& column) {
  const double n = static_cast<double>(column.size());
  const double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
  double ss = 0.0;
  for (double& v : column) {
    v -= mean;
    ss += v * v;
  }
  if (column.size() < 2 || ss == 0.0) return;
  const double sd = std::sqrt(ss / (n - 1.0));
  for (double& v : column) v /= sd;
}

Dataset gen_toys_raw(const ToysConfig& cfg) {
  if (cfg.p < 6) throw ConfigError(fmt::format("toys data needs p >= 6, got {}", cfg.p));
  const std::size_t n = cfg.n;
  const std::size_t p = cfg.p;
  Rng rng = make_rng(cfg.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution first_regime(0.7);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> x(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = coin(rng);
    const double sign = positive ? 1.0 : -1.0;
    y[i] = positive ? 1.0 : 0.0;
    const bool regime = first_regime(rng);
    for (std::size_t j = 0; j < 6; ++j) {
      // Variables 1..3 carry the class in the 70% regime, 4..6 in the rest.
      double mean = 0.0;
      if (regime && j < 3) mean = static_cast<double>(j + 1);
      if (!regime && j >= 3) mean = static_cast<double>(j - 2);
      x[j * n + i] = sign * (mean + normal(rng));
    }
    for (std::size_t j = 6; j < p; ++j) x[j * n + i] = normal(rng);
  }
  return Dataset(std::move(x), std::move(y), positional_names(p), Task::classification(2));
}

Dataset gen_toys(const ToysConfig& cfg) {
  Dataset raw = gen_toys_raw(cfg);
  const std::size_t n = raw.num_rows();
  std::vector<double> x = raw.raw_features();
  std::vector<double> column(n);
  for (std::size_t j = 0; j < raw.num_features(); ++j) {
    std::copy(x.begin() + j * n, x.begin() + (j + 1) * n, column.begin());
    standardize(column);
    std::copy(column.begin(), column.end(), x.begin() + j * n);
  }
  std::vector<double> y(raw.response().begin(), raw.response().end());
  Dataset d(std::move(x), std::move(y), raw.feature_names(), raw.task());
  d.require_all_classes_present();
  return d;
}

Dataset add_replicates(const Dataset& d, const std::vector<ReplicateSpec>& specs, RngSeed seed,
                       std::size_t insert_at) {
  const std::size_t n = d.num_rows();
  const std::size_t p = d.num_features();
  insert_at = std::min(insert_at, p);

  std::set<std::size_t> sources;
  std::size_t total = 0;
  for (const auto& spec : specs) {
    if (!(spec.correlation > 0.0 && spec.correlation < 1.0)) {
      throw ConfigError(fmt::format("replicate correlation must lie in (0,1), got {}", spec.correlation));
    }
    if (spec.source_variable >= p) {
      throw ConfigError(fmt::format("replicate source {} out of range (p={})", spec.source_variable + 1, p));
    }
    if (!sources.insert(spec.source_variable).second) {
      throw ConfigError(fmt::format("replicate source {} listed twice", spec.source_variable + 1));
    }
    total += spec.count;
  }

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> replicas;
  std::vector<std::string> replica_names;
  for (const auto& spec : specs) {
    std::vector<double> source(d.column(spec.source_variable).begin(), d.column(spec.source_variable).end());
    standardize(source);
    const double rho = spec.correlation;
    const double residual = std::sqrt(1.0 - rho * rho);
    const std::size_t source_pos =
        spec.source_variable < insert_at ? spec.source_variable + 1 : spec.source_variable + 1 + total;
    for (std::size_t r = 0; r < spec.count; ++r) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = rho * source[i] + residual * normal(rng);
      standardize(col);
      replica_names.push_back(fmt::format("{}^{}", insert_at + replicas.size() + 1, source_pos));
      replicas.push_back(std::move(col));
    }
  }

  std::vector<double> x;
  x.reserve(n * (p + total));
  std::vector<std::string> names;
  names.reserve(p + total);
  const auto& old = d.raw_features();
  x.insert(x.end(), old.begin(), old.begin() + insert_at * n);
  names.insert(names.end(), d.feature_names().begin(), d.feature_names().begin() + insert_at);
  for (std::size_t r = 0; r < replicas.size(); ++r) {
    x.insert(x.end(), replicas[r].begin(), replicas[r].end());
    names.push_back(replica_names[r]);
  }
  x.insert(x.end(), old.begin() + insert_at * n, old.end());
  names.insert(names.end(), d.feature_names().begin() + insert_at, d.feature_names().end());

  std::vector<double> y(d.response().begin(), d.response().end());
  return Dataset(std::move(x), std::move(y), std::move(names), d.task());
}

std::vector<std::size_t> true_variables_friedman(int variant) {
  if (variant == 1) return {0, 1, 2, 3, 4};
  return {0, 1, 2, 3};
}

std::vector<std::size_t> true_variables_toys() { return {0, 1, 2, 3, 4, 5}; }

}  // namespace rfsel
