#include "rfsel/simd/kernels.hpp"

namespace rfsel::simd::scalar {

void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out) {
  const std::size_t m = left_sums.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double nl = static_cast<double>(i + 1);
    const double nr = count - nl;
    const double sl = left_sums[i];
    const double sr = total - sl;
    out[i] = (sl * sl) / nl + (sr * sr) / nr;
  }
}

void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out) {
  const std::size_t classes = class_totals.size();
  for (std::size_t i = 0; i < m; ++i) {
    double sum_left = 0.0;
    double sum_right = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double l = left_counts[k * m + i];
      const double r = class_totals[k] - l;
      sum_left = sum_left + l * l;
      sum_right = sum_right + r * r;
    }
    const double nl = static_cast<double>(i + 1);
    const double nr = count - nl;
    out[i] = sum_left / nl + sum_right / nr;
  }
}

}  // namespace rfsel::simd::scalar
