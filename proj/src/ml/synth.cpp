// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/synth.hpp"

#include <random>

namespace bagchain::ml {

Dataset synthesize_dataset(const BlobParams& p) {
  if (p.classes < 2) throw DatasetError("synthetic data needs at least two classes");
  if (p.features < 1) throw DatasetError("synthetic data needs at least one feature");
  if (p.samples < p.classes) throw DatasetError("synthetic data needs at least one sample per class");
  if (!(p.separation >= 0.0)) throw DatasetError("separation must be non-negative");

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> centres(static_cast<std::size_t>(p.classes) * p.features);
  for (auto& c : centres) c = p.separation * normal(rng);

  Dataset out(p.features, p.classes);
  out.reserve(p.samples);
  std::vector<double> row(p.features);
  for (std::size_t i = 0; i < p.samples; ++i) {
    auto y = static_cast<Label>(i % p.classes);
    for (std::size_t j = 0; j < p.features; ++j) row[j] = centres[y * p.features + j] + normal(rng);
    out.push_back(row, y);
  }
  return out;
}

}  // namespace bagchain::ml
