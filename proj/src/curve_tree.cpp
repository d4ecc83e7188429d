#include <cmath>
#include <vector>

#include "rfsel/cart.hpp"
#include "rfsel/error.hpp"

namespace rfsel {

std::vector<double> fit_1d_curve_tree(std::span<const double> ys, std::size_t min_leaf) {
  const std::size_t m = ys.size();
  if (m < 2) throw ConfigError("curve tree needs at least 2 points");
  if (min_leaf < 1) throw ConfigError("curve tree min_leaf must be at least 1");

  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + ys[i];

  std::vector<double> fitted(m);
  struct Segment {
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Segment> stack{{0, m}};
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    const std::size_t count = seg.end - seg.begin;
    const double total = prefix[seg.end] - prefix[seg.begin];
    const double parent = total * total / static_cast<double>(count);

    std::size_t best_cut = 0;
    double best_score = 0.0;
    bool found = false;
    for (std::size_t cut = seg.begin + min_leaf; cut + min_leaf <= seg.end; ++cut) {
      const double left = prefix[cut] - prefix[seg.begin];
      const double right = total - left;
      const double nl = static_cast<double>(cut - seg.begin);
      const double nr = static_cast<double>(seg.end - cut);
      const double score = left * left / nl + right * right / nr;
      if (!found || score > best_score + 1e-12 * std::abs(best_score)) {
        found = true;
        best_cut = cut;
        best_score = score;
      }
    }

    if (found && best_score - parent > 1e-12 * std::abs(best_score)) {
      stack.push_back({best_cut, seg.end});
      stack.push_back({seg.begin, best_cut});
      continue;
    }
    // Summed directly: prefix differences would blur a constant segment.
    double sum = 0.0;
    for (std::size_t i = seg.begin; i < seg.end; ++i) sum += ys[i];
    const double mean = sum / static_cast<double>(count);
    for (std::size_t i = seg.begin; i < seg.end; ++i) fitted[i] = mean;
  }
  return fitted;
}

}  // namespace rfsel
