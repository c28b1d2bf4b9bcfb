// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/tree.hpp"

namespace bagchain::kernels {

namespace serial {
void predict_rows(const ml::DecisionTree& tree, const ml::Dataset& data, std::span<ml::Label> out);
}

namespace omp {
void predict_rows(const ml::DecisionTree& tree, const ml::Dataset& data, std::span<ml::Label> out);
}

inline void predict_rows(Exec exec, const ml::DecisionTree& tree, const ml::Dataset& data,
                         std::span<ml::Label> out) {
  exec == Exec::parallel ? omp::predict_rows(tree, data, out) : serial::predict_rows(tree, data, out);
}

}  // namespace bagchain::kernels
