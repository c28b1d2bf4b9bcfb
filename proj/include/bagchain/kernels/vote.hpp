// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/dataset.hpp"

namespace bagchain::kernels {

// Per-sample plurality over `ballots` (one label vector per model, equal
// lengths). Ties go to the smallest class index.
namespace serial {
void plurality_vote(std::span<const std::span<const ml::Label>> ballots, std::uint32_t num_classes,
                    std::span<ml::Label> out);
}

namespace omp {
void plurality_vote(std::span<const std::span<const ml::Label>> ballots, std::uint32_t num_classes,
                    std::span<ml::Label> out);
}

inline void plurality_vote(Exec exec, std::span<const std::span<const ml::Label>> ballots,
                           std::uint32_t num_classes, std::span<ml::Label> out) {
  exec == Exec::parallel ? omp::plurality_vote(ballots, num_classes, out)
                         : serial::plurality_vote(ballots, num_classes, out);
}

}  // namespace bagchain::kernels
