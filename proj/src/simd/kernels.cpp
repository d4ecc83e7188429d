#include "rfsel/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "rfsel/error.hpp"

namespace rfsel::simd {
namespace {

constexpr int kUnset = -1;
std::atomic<int> g_active{kUnset};

Isa initial_isa() {
  if (const char* env = std::getenv("RFSEL_ISA")) {
    const std::string value(env);
    if (value == "scalar") return Isa::Scalar;
    if (value == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (value == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  return best_available_isa();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(RFSEL_BUILD_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(RFSEL_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_available_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() {
  int current = g_active.load(std::memory_order_relaxed);
  if (current == kUnset) {
    current = static_cast<int>(initial_isa());
    g_active.store(current, std::memory_order_relaxed);
  }
  return static_cast<Isa>(current);
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this machine");
  }
  g_active.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void sse_split_scores(std::span<const double> left_sums, double total, double count,
                      std::span<double> out) {
  switch (active_isa()) {
#if defined(RFSEL_BUILD_AVX2)
    case Isa::Avx2: return avx2::sse_split_scores(left_sums, total, count, out);
#endif
#if defined(RFSEL_BUILD_NEON)
    case Isa::Neon: return neon::sse_split_scores(left_sums, total, count, out);
#endif
    default: return scalar::sse_split_scores(left_sums, total, count, out);
  }
}

void gini_split_scores(std::span<const double> left_counts, std::span<const double> class_totals,
                       std::size_t m, double count, std::span<double> out) {
  switch (active_isa()) {
#if defined(RFSEL_BUILD_AVX2)
    case Isa::Avx2: return avx2::gini_split_scores(left_counts, class_totals, m, count, out);
#endif
#if defined(RFSEL_BUILD_NEON)
    case Isa::Neon: return neon::gini_split_scores(left_counts, class_totals, m, count, out);
#endif
    default: return scalar::gini_split_scores(left_counts, class_totals, m, count, out);
  }
}

}  // namespace rfsel::simd
