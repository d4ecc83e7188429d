#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

#include "rfsel/dataset.hpp"
#include "rfsel/rng.hpp"

namespace testing {

inline std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t f = 0; f < p; ++f) names.push_back(fmt::format("X{}", f + 1));
  return names;
}

// Column-major dataset from row-major values.
inline rfsel::Dataset from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                                const rfsel::Task& task) {
  const std::size_t n = rows.size();
  const std::size_t p = rows.at(0).size();
  std::vector<double> values(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) values[f * n + i] = rows[i][f];
  }
  return rfsel::Dataset(std::move(values), y, default_names(p), task);
}

// Random instance for oracle comparisons. Features mix a coarse integer
// grid (to force ties) with continuous draws; regression responses are
// multiples of 1/4 so split scores are exact.
inline rfsel::Dataset random_instance(std::mt19937_64& rng, std::size_t n, std::size_t p, bool classify,
                                      std::size_t classes = 2) {
  std::vector<double> values(n * p);
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_int_distribution<int> grid(0, 5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t f = 0; f < p; ++f) {
    const bool coarse = coin(rng) != 0;
    for (std::size_t i = 0; i < n; ++i) values[f * n + i] = coarse ? grid(rng) : unif(rng);
  }
  std::vector<double> y(n);
  if (classify) {
    std::uniform_int_distribution<std::size_t> cls(0, classes - 1);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i < classes ? i : cls(rng));
    return rfsel::Dataset(std::move(values), std::move(y), default_names(p),
                          rfsel::Task::classification(classes));
  }
  std::uniform_int_distribution<int> quarter(-8, 8);
  for (auto& v : y) v = quarter(rng) / 4.0;
  return rfsel::Dataset(std::move(values), std::move(y), default_names(p), rfsel::Task::regression());
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("rfsel-test-{}-{}-{}", tag, static_cast<long>(::getpid()), counter++);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Empty when both run directories hold the same files with identical bytes,
// ignoring the manifest's runtime block; otherwise the first difference.
inline std::string compare_run_dirs(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::string> names_a, names_b;
  for (const auto& e : std::filesystem::directory_iterator(a)) names_a.push_back(e.path().filename().string());
  for (const auto& e : std::filesystem::directory_iterator(b)) names_b.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) return "different file sets";
  for (const auto& name : names_a) {
    std::string x = read_file(a / name);
    std::string y = read_file(b / name);
    if (name == "manifest.json") {
      auto jx = nlohmann::json::parse(x);
      auto jy = nlohmann::json::parse(y);
      jx.erase("runtime");
      jy.erase("runtime");
      x = jx.dump();
      y = jy.dump();
    }
    if (x != y) return name + " differs";
  }
  return {};
}

}  // namespace testing
