// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "bagchain/ml/dataset.hpp"

namespace bagchain::ml {

struct BlobParams {
  std::size_t samples = 1000;
  std::size_t features = 10;
  std::uint32_t classes = 2;
  double separation = 1.0;  // scale of the class-centre spread; 0 makes labels independent of features
  std::uint64_t seed = 0;
};

/// Gaussian-blob mixture: class centres ~ N(0, separation^2 I), samples are
/// centre + N(0, I). Labels are balanced (row i has label i mod classes).
Dataset synthesize_dataset(const BlobParams& params);

}  // namespace bagchain::ml
