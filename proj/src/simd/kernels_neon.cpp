#include <arm_neon.h>

#include "rfsel/simd/kernels.hpp"

namespace rfsel::simd::neon {

void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out) {
  const std::size_t m = left_sums.size();
  const float64x2_t vtotal = vdupq_n_f64(total);
  const float64x2_t vcount = vdupq_n_f64(count);
  const float64x2_t step = vdupq_n_f64(2.0);
  const double first[2] = {1.0, 2.0};
  float64x2_t nl = vld1q_f64(first);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const float64x2_t sl = vld1q_f64(left_sums.data() + i);
    const float64x2_t sr = vsubq_f64(vtotal, sl);
    const float64x2_t nr = vsubq_f64(vcount, nl);
    const float64x2_t left = vdivq_f64(vmulq_f64(sl, sl), nl);
    const float64x2_t right = vdivq_f64(vmulq_f64(sr, sr), nr);
    vst1q_f64(out.data() + i, vaddq_f64(left, right));
    nl = vaddq_f64(nl, step);
  }
  for (; i < m; ++i) {
    const double l = static_cast<double>(i + 1);
    const double sl = left_sums[i];
    const double sr = total - sl;
    out[i] = (sl * sl) / l + (sr * sr) / (count - l);
  }
}

void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out) {
  const std::size_t classes = class_totals.size();
  const float64x2_t vcount = vdupq_n_f64(count);
  const float64x2_t step = vdupq_n_f64(2.0);
  const double first[2] = {1.0, 2.0};
  float64x2_t nl = vld1q_f64(first);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    float64x2_t sum_left = vdupq_n_f64(0.0);
    float64x2_t sum_right = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < classes; ++k) {
      const float64x2_t l = vld1q_f64(left_counts.data() + k * m + i);
      const float64x2_t r = vsubq_f64(vdupq_n_f64(class_totals[k]), l);
      sum_left = vaddq_f64(sum_left, vmulq_f64(l, l));
      sum_right = vaddq_f64(sum_right, vmulq_f64(r, r));
    }
    const float64x2_t nr = vsubq_f64(vcount, nl);
    vst1q_f64(out.data() + i, vaddq_f64(vdivq_f64(sum_left, nl), vdivq_f64(sum_right, nr)));
    nl = vaddq_f64(nl, step);
  }
  for (; i < m; ++i) {
    double sum_left = 0.0;
    double sum_right = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double l = left_counts[k * m + i];
      const double r = class_totals[k] - l;
      sum_left = sum_left + l * l;
      sum_right = sum_right + r * r;
    }
    const double l = static_cast<double>(i + 1);
    out[i] = sum_left / l + sum_right / (count - l);
  }
}

}  // namespace rfsel::simd::neon
