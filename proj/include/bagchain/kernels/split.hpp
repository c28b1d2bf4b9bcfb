// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/dataset.hpp"

namespace bagchain::kernels {

/// Gini split quality as an exact rational:
///   sum_c left_c^2 / n_left + sum_c right_c^2 / n_right
/// Larger is better; it equals n - n * weighted_gini, so maximising it
/// minimises the weighted child impurity.
struct SplitScore {
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;

  [[nodiscard]] bool better_than(const SplitScore& o) const { return num * o.den > o.num * den; }
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left_count = 0;
  SplitScore score;
};

/// Best threshold on one feature, scanning ascending values; only strictly
/// better candidates replace the incumbent so the smallest threshold wins ties.
std::optional<SplitCandidate> best_split_on_feature(const ml::Dataset& data, std::span<const std::size_t> rows,
                                                    std::size_t feature, std::size_t min_leaf);

namespace serial {
std::optional<SplitCandidate> best_split(const ml::Dataset& data, std::span<const std::size_t> rows,
                                         std::size_t min_leaf);
}

namespace omp {
std::optional<SplitCandidate> best_split(const ml::Dataset& data, std::span<const std::size_t> rows,
                                         std::size_t min_leaf);
}

inline std::optional<SplitCandidate> best_split(Exec exec, const ml::Dataset& data,
                                                std::span<const std::size_t> rows, std::size_t min_leaf) {
  return exec == Exec::parallel ? omp::best_split(data, rows, min_leaf) : serial::best_split(data, rows, min_leaf);
}

}  // namespace bagchain::kernels
