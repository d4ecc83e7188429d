#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rfsel/rng.hpp"

namespace rfsel {

struct Task {
  enum class Kind { Regression, Classification };

  Kind kind = Kind::Regression;
  std::size_t num_classes = 0;  // 0 for regression

  static Task regression() { return {Kind::Regression, 0}; }
  static Task classification(std::size_t classes) { return {Kind::Classification, classes}; }

  bool is_classification() const { return kind == Kind::Classification; }
  friend bool operator==(const Task&, const Task&) = default;
};

std::string to_string(const Task& task);

// Dense numeric dataset. Features are stored column-major so that a
// feature's n values are contiguous. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  // features.size() must equal n * names.size(), column-major.
  Dataset(std::vector<double> features, std::vector<double> response,
          std::vector<std::string> feature_names, Task task);

  std::size_t num_rows() const { return response_.size(); }
  std::size_t num_features() const { return names_.size(); }
  const Task& task() const { return task_; }

  std::span<const double> column(std::size_t feature) const {
    return {features_.data() + feature * num_rows(), num_rows()};
  }
  double value(std::size_t row, std::size_t feature) const {
    return features_[feature * num_rows() + row];
  }
  std::span<const double> response() const { return response_; }
  double response(std::size_t row) const { return response_[row]; }
  std::size_t label(std::size_t row) const { return static_cast<std::size_t>(response_[row]); }

  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<double>& raw_features() const { return features_; }

  // Classification invariant: every class id 0..c-1 occurs at least once.
  // Derived row subsets may violate it; primary constructors enforce it.
  void require_all_classes_present() const;

  std::vector<std::size_t> class_counts() const;

  // Copy restricted to the given feature columns, in the given order.
  Dataset select_features(std::span<const std::size_t> features) const;

  // Copy restricted to the given rows, in the given order.
  Dataset select_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> features_;
  std::vector<double> response_;
  std::vector<std::string> names_;
  Task task_;
};

struct Split {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// What load_csv did to the raw file, emitted next to results.
struct CsvMetadata {
  std::string path;
  std::string response_column;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::vector<std::string> class_labels;  // index = class id
  // Categorical feature columns: column name -> category codes by first appearance.
  std::map<std::string, std::vector<std::string>> categorical_codes;
};

struct LoadedCsv {
  Dataset dataset;
  CsvMetadata metadata;
};

// Reads a comma-separated file with a header row. Rows with "NA" or empty
// cells are dropped. Class labels and non-numeric feature columns are coded
// 0,1,... in order of first appearance.
LoadedCsv load_csv(const std::filesystem::path& path, Task::Kind task,
                   const std::string& response_column);

// Writes the dataset in the same dialect load_csv reads. The response
// column is last and named `response_name`.
void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& response_name = "y");
void write_csv(const Dataset& d, std::ostream& out, const std::string& response_name = "y");

// k folds whose test parts partition 0..n-1. Classification folds are
// stratified by class; regression folds are plain random partitions.
// `warnings` receives a note for every class with fewer than k members.
std::vector<Split> stratified_folds(const Dataset& d, std::size_t k, RngSeed seed,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace rfsel
