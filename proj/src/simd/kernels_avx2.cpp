#include <immintrin.h>

#include "rfsel/simd/kernels.hpp"

namespace rfsel::simd::avx2 {

void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out) {
  const std::size_t m = left_sums.size();
  const __m256d vtotal = _mm256_set1_pd(total);
  const __m256d vcount = _mm256_set1_pd(count);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d nl = _mm256_set_pd(4.0, 3.0, 2.0, 1.0);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const __m256d sl = _mm256_loadu_pd(left_sums.data() + i);
    const __m256d sr = _mm256_sub_pd(vtotal, sl);
    const __m256d nr = _mm256_sub_pd(vcount, nl);
    const __m256d left = _mm256_div_pd(_mm256_mul_pd(sl, sl), nl);
    const __m256d right = _mm256_div_pd(_mm256_mul_pd(sr, sr), nr);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(left, right));
    nl = _mm256_add_pd(nl, step);
  }
  for (std::size_t j = i; j < m; ++j) {
    const double l = static_cast<double>(j + 1);
    const double sl = left_sums[j];
    const double sr = total - sl;
    out[j] = (sl * sl) / l + (sr * sr) / (count - l);
  }
}

void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out) {
  const std::size_t classes = class_totals.size();
  const __m256d vcount = _mm256_set1_pd(count);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d nl = _mm256_set_pd(4.0, 3.0, 2.0, 1.0);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    __m256d sum_left = _mm256_setzero_pd();
    __m256d sum_right = _mm256_setzero_pd();
    for (std::size_t k = 0; k < classes; ++k) {
      const __m256d l = _mm256_loadu_pd(left_counts.data() + k * m + i);
      const __m256d r = _mm256_sub_pd(_mm256_set1_pd(class_totals[k]), l);
      sum_left = _mm256_add_pd(sum_left, _mm256_mul_pd(l, l));
      sum_right = _mm256_add_pd(sum_right, _mm256_mul_pd(r, r));
    }
    const __m256d nr = _mm256_sub_pd(vcount, nl);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_add_pd(_mm256_div_pd(sum_left, nl), _mm256_div_pd(sum_right, nr)));
    nl = _mm256_add_pd(nl, step);
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

}  // namespace rfsel::simd::avx2
