// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>
#include <vector>

#include "bagchain/kernels/split.hpp"

namespace bagchain::kernels {

std::optional<SplitCandidate> best_split_on_feature(const ml::Dataset& data, std::span<const std::size_t> rows,
                                                    std::size_t feature, std::size_t min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2 * min_leaf || n < 2) return std::nullopt;
  const std::uint32_t classes = data.num_classes();

  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double va = data.at(a, feature), vb = data.at(b, feature);
    return va < vb || (va == vb && a < b);
  });

  std::vector<std::uint64_t> left(classes, 0), right(classes, 0);
  for (auto r : order) ++right[data.label(r)];
  // Sums of squared class counts, updated incrementally as rows move left.
  std::uint64_t sq_left = 0, sq_right = 0;
  for (auto c : right) sq_right += c * c;

  std::optional<SplitCandidate> best;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto y = data.label(order[i]);
    sq_left += 2 * left[y] + 1;
    ++left[y];
    sq_right -= 2 * right[y] - 1;
    --right[y];

    const std::size_t n_left = i + 1, n_right = n - n_left;
    if (n_left < min_leaf || n_right < min_leaf) continue;
    double lo = data.at(order[i], feature), hi = data.at(order[i + 1], feature);
    if (!(lo < hi)) continue;

    SplitScore score{static_cast<unsigned __int128>(sq_left) * n_right +
                         static_cast<unsigned __int128>(sq_right) * n_left,
                     static_cast<unsigned __int128>(n_left) * n_right};
    if (!best || score.better_than(best->score)) {
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;
      best = SplitCandidate{feature, mid, n_left, score};
    }
  }
  return best;
}

}  // namespace bagchain::kernels
