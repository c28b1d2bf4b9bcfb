// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bagchain/kernels/predict.hpp"
#include "bagchain/kernels/split.hpp"
#include "bagchain/kernels/vote.hpp"

namespace bagchain::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n <= 0) n = omp_get_num_procs();
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace omp {

void predict_rows(const ml::DecisionTree& tree, const ml::Dataset& data, std::span<ml::Label> out) {
  if (out.size() != data.rows()) throw std::invalid_argument("prediction buffer size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = tree.predict_row(data.row(static_cast<std::size_t>(i)));
}

void plurality_vote(std::span<const std::span<const ml::Label>> ballots, std::uint32_t num_classes,
                    std::span<ml::Label> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel
  {
    std::vector<std::uint32_t> counts(num_classes);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      auto s = static_cast<std::size_t>(i);
      std::fill(counts.begin(), counts.end(), 0u);
      for (const auto& b : ballots) ++counts[b[s]];
      out[s] = static_cast<ml::Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
  }
}

std::optional<SplitCandidate> best_split(const ml::Dataset& data, std::span<const std::size_t> rows,
                                         std::size_t min_leaf) {
  const auto d = static_cast<std::ptrdiff_t>(data.cols());
  std::vector<std::optional<SplitCandidate>> per_feature(data.cols());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < d; ++f)
    per_feature[static_cast<std::size_t>(f)] =
        best_split_on_feature(data, rows, static_cast<std::size_t>(f), min_leaf);
  // Reduce in feature order so ties keep the smallest feature index.
  std::optional<SplitCandidate> best;
  for (auto& cand : per_feature)
    if (cand && (!best || cand->score.better_than(best->score))) best = cand;
  return best;
}

}  // namespace omp
}  // namespace bagchain::kernels
