// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels. Keep these simple; the OpenMP versions must
// match them bit for bit.
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "bagchain/kernels/predict.hpp"
#include "bagchain/kernels/split.hpp"
#include "bagchain/kernels/vote.hpp"

namespace bagchain::kernels::serial {

void predict_rows(const ml::DecisionTree& tree, const ml::Dataset& data, std::span<ml::Label> out) {
  if (out.size() != data.rows()) throw std::invalid_argument("prediction buffer size mismatch");
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = tree.predict_row(data.row(i));
}

void plurality_vote(std::span<const std::span<const ml::Label>> ballots, std::uint32_t num_classes,
                    std::span<ml::Label> out) {
  std::vector<std::uint32_t> counts(num_classes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (const auto& b : ballots) ++counts[b[i]];
    // max_element returns the first maximum: smallest class index on ties.
    out[i] = static_cast<ml::Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
}

std::optional<SplitCandidate> best_split(const ml::Dataset& data, std::span<const std::size_t> rows,
                                         std::size_t min_leaf) {
  std::optional<SplitCandidate> best;
  for (std::size_t f = 0; f < data.cols(); ++f) {
    auto cand = best_split_on_feature(data, rows, f, min_leaf);
    if (cand && (!best || cand->score.better_than(best->score))) best = cand;
  }
  return best;
}

}  // namespace bagchain::kernels::serial
