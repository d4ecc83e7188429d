#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Split-scoring kernels. Given prefix statistics of a node sorted along one
// feature, they score every "first i+1 rows go left" cut in one pass.
//
// Every variant performs the same IEEE operations in the same order per
// element, so results are bit-identical across ISAs. Builds must not enable
// floating-point contraction.
namespace rfsel::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa best_available_isa();

// The ISA used by the dispatching entry points below. Selected at first use
// from the CPU, overridable for tests and benchmarks.
Isa active_isa();
void force_isa(Isa isa);

// out[i] = L_i^2 / (i+1) + (total - L_i)^2 / (count - i - 1), where L_i is
// left_sums[i]. Requires left_sums.size() <= count - 1.
void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out);

// Class-major prefix counts: left_counts[k * m + i] is the number of rows of
// class k among the first i+1. With SL = sum_k l_k^2 and SR = sum_k (T_k - l_k)^2,
// out[i] = SL / (i+1) + SR / (count - i - 1).
void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out);

namespace scalar {
void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out);
void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out);
void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out);
}  // namespace avx2

namespace neon {
void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out);
void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out);
}  // namespace neon

}  // namespace rfsel::simd
