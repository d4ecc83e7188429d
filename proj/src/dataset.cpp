#include "rfsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "rfsel/error.hpp"

namespace rfsel {

std::string to_string(const Task& task) {
  if (task.is_classification()) return fmt::format("classification({})", task.num_classes);
  return "regression";
}

Dataset::Dataset(std::vector<double> features, std::vector<double> response,
                 std::vector<std::string> feature_names, Task task)
    : features_(std::move(features)),
      response_(std::move(response)),
      names_(std::move(feature_names)),
      task_(task) {
  const std::size_t n = response_.size();
  const std::size_t p = names_.size();
  if (n < 2) throw DataError(fmt::format("dataset needs at least 2 rows, got {}", n));
  if (p < 1) throw DataError("dataset needs at least 1 feature column");
  if (features_.size() != n * p) {
    throw DataError(fmt::format("feature matrix has {} values, expected {}x{}", features_.size(), n, p));
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw DataError("feature matrix contains a non-finite value");
  }
  std::set<std::string> unique(names_.begin(), names_.end());
  if (unique.size() != p) throw DataError("feature names must be unique");

  if (task_.is_classification()) {
    if (task_.num_classes < 1) throw DataError("classification task needs at least one class");
    for (double y : response_) {
      if (y < 0 || y != std::floor(y) || y >= static_cast<double>(task_.num_classes)) {
        throw DataError(fmt::format("class label {} outside 0..{}", y, task_.num_classes - 1));
      }
    }
  } else {
    for (double y : response_) {
      if (!std::isfinite(y)) throw DataError("response contains a non-finite value");
    }
  }
}

void Dataset::require_all_classes_present() const {
  if (!task_.is_classification()) return;
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw DataError(fmt::format("class {} has no observations", c));
  }
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(task_.num_classes, 0);
  if (!task_.is_classification()) return counts;
  for (std::size_t i = 0; i < num_rows(); ++i) ++counts[label(i)];
  return counts;
}

Dataset Dataset::select_features(std::span<const std::size_t> features) const {
  const std::size_t n = num_rows();
  std::vector<double> values;
  values.reserve(n * features.size());
  std::vector<std::string> names;
  names.reserve(features.size());
  for (std::size_t f : features) {
    if (f >= num_features()) throw ConfigError(fmt::format("feature index {} out of range", f));
    auto col = column(f);
    values.insert(values.end(), col.begin(), col.end());
    names.push_back(names_[f]);
  }
  return Dataset(std::move(values), response_, std::move(names), task_);
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  const std::size_t p = num_features();
  std::vector<double> values;
  values.reserve(rows.size() * p);
  for (std::size_t f = 0; f < p; ++f) {
    auto col = column(f);
    for (std::size_t r : rows) values.push_back(col[r]);
  }
  std::vector<double> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(response_[r]);
  return Dataset(std::move(values), std::move(y), names_, task_);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string current;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      current.push_back(ch);
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  cells.push_back(trim(current));
  return cells;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA"; }

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace

LoadedCsv load_csv(const std::filesystem::path& path, Task::Kind task,
                   const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open CSV file '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line)) throw DataError(fmt::format("CSV file '{}' is empty", path.string()));
  const std::vector<std::string> header = split_line(line);
  const auto response_it = std::find(header.begin(), header.end(), response_column);
  if (response_it == header.end()) {
    throw DataError(fmt::format("response column '{}' not found in '{}'", response_column, path.string()));
  }
  const std::size_t response_index = static_cast<std::size_t>(response_it - header.begin());
  if (header.size() < 2) throw DataError("CSV has no feature columns");

  CsvMetadata meta;
  meta.path = path.string();
  meta.response_column = response_column;

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError(fmt::format("CSV row {} has {} cells, header has {}", meta.rows_read + 2,
                                  cells.size(), header.size()));
    }
    ++meta.rows_read;
    if (std::any_of(cells.begin(), cells.end(), is_missing)) {
      ++meta.rows_dropped;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.size() < 2) {
    throw DataError(fmt::format("CSV '{}' has {} usable rows, need at least 2", path.string(), rows.size()));
  }

  const std::size_t n = rows.size();
  std::vector<double> response(n);
  Task resolved_task;
  if (task == Task::Kind::Classification) {
    std::unordered_map<std::string, std::size_t> codes;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& label = rows[i][response_index];
      auto [it, inserted] = codes.emplace(label, meta.class_labels.size());
      if (inserted) meta.class_labels.push_back(label);
      response[i] = static_cast<double>(it->second);
    }
    resolved_task = Task::classification(meta.class_labels.size());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!parse_double(rows[i][response_index], response[i])) {
        throw DataError(fmt::format("non-numeric regression response '{}' on data row {}",
                                    rows[i][response_index], i + 1));
      }
    }
    resolved_task = Task::regression();
  }

  std::vector<double> features;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == response_index) continue;
    names.push_back(header[c]);
    std::vector<double> col(n);
    bool numeric = true;
    for (std::size_t i = 0; i < n && numeric; ++i) numeric = parse_double(rows[i][c], col[i]);
    if (!numeric) {
      std::unordered_map<std::string, std::size_t> codes;
      std::vector<std::string> categories;
      for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = codes.emplace(rows[i][c], categories.size());
        if (inserted) categories.push_back(rows[i][c]);
        col[i] = static_cast<double>(it->second);
      }
      meta.categorical_codes.emplace(header[c], std::move(categories));
    }
    features.insert(features.end(), col.begin(), col.end());
  }

  Dataset d(std::move(features), std::move(response), std::move(names), resolved_task);
  d.require_all_classes_present();
  return {std::move(d), std::move(meta)};
}

void write_csv(const Dataset& d, const std::filesystem::path& path, const std::string& response_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_csv(d, out, response_name);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
}

void write_csv(const Dataset& d, std::ostream& out, const std::string& response_name) {
  for (const auto& name : d.feature_names()) out << name << ',';
  out << response_name << '\n';
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    for (std::size_t f = 0; f < d.num_features(); ++f) out << format_double(d.value(i, f)) << ',';
    out << format_double(d.response(i)) << '\n';
  }
}

std::vector<Split> stratified_folds(const Dataset& d, std::size_t k, RngSeed seed,
                                    std::vector<std::string>* warnings) {
  const std::size_t n = d.num_rows();
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (k > n) throw ConfigError(fmt::format("fold count {} exceeds row count {}", k, n));

  Rng rng = make_rng(seed);
  std::vector<std::vector<std::size_t>> strata;
  if (d.task().is_classification()) {
    strata.resize(d.task().num_classes);
    for (std::size_t i = 0; i < n; ++i) strata[d.label(i)].push_back(i);
  } else {
    strata.emplace_back(n);
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
  }

  // Deal each shuffled stratum round-robin, continuing the rotation across
  // strata so that fold sizes differ by at most one.
  std::vector<std::vector<std::size_t>> tests(k);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto& members = strata[s];
    if (warnings && d.task().is_classification() && members.size() < k) {
      warnings->push_back(fmt::format("class {} has {} members, fewer than {} folds", s, members.size(), k));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) {
      tests[cursor % k].push_back(idx);
      ++cursor;
    }
  }

  std::vector<Split> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    std::vector<bool> in_test(n, false);
    for (std::size_t idx : tests[f]) in_test[idx] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) folds[f].train_indices.push_back(i);
    }
    folds[f].test_indices = std::move(tests[f]);
  }
  return folds;
}

}  // namespace rfsel
