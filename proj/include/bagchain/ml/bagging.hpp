// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagchain/chain/fraction.hpp"
#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/dataset.hpp"

namespace bagchain::ml {

/// Bootstrap sample: n rows drawn uniformly with replacement.
Dataset resample(const Dataset& data, std::uint64_t seed);
/// The row indices `resample` draws, exposed for tests.
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed);

/// Majority vote across models' predicted labels, smallest class index on
/// ties. Result is independent of the order of `predictions`.
std::vector<Label> aggregate(std::span<const std::vector<Label>> predictions, std::uint32_t num_classes,
                             kernels::Exec exec = kernels::Exec::serial);

/// Accuracy as an exact (correct, total) pair.
Fraction metric(std::span<const Label> predicted, std::span<const Label> truth);

}  // namespace bagchain::ml
