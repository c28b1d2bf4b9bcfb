// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/bagging.hpp"

#include <random>
#include <stdexcept>

#include "bagchain/kernels/vote.hpp"

namespace bagchain::ml {

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DatasetError("cannot resample an empty dataset");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Dataset resample(const Dataset& data, std::uint64_t seed) {
  auto idx = bootstrap_indices(data.rows(), seed);
  return subset(data, idx, data.role());
}

std::vector<Label> aggregate(std::span<const std::vector<Label>> predictions, std::uint32_t num_classes,
                             kernels::Exec exec) {
  if (predictions.empty()) throw std::invalid_argument("aggregate needs at least one model");
  const auto n = predictions.front().size();
  std::vector<std::span<const Label>> ballots;
  ballots.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (p.size() != n) throw std::invalid_argument("prediction vectors differ in length");
    for (auto y : p)
      if (y >= num_classes) throw std::invalid_argument("predicted label out of range");
    ballots.emplace_back(p);
  }
  std::vector<Label> out(n);
  kernels::plurality_vote(exec, ballots, num_classes, out);
  return out;
}

Fraction metric(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("metric inputs differ in length");
  if (truth.empty()) throw std::invalid_argument("metric needs at least one sample");
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  return {correct, truth.size()};
}

}  // namespace bagchain::ml
