// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bagchain::ml {

namespace {
constexpr int kMaxDirichletAttempts = 20;

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}
}  // namespace

void SplitPlan::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw SplitError("kappa must lie in (0, 1]");
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw SplitError("zeta must lie in [0, 1]");
  if (heterogeneity == Heterogeneity::iid && partitions == 0 && zeta > 0.0)
    throw SplitError("IID split needs at least one partition");
  if (heterogeneity == Heterogeneity::dirichlet && !(beta > 0.0)) throw SplitError("beta must be positive");
}

std::size_t share_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

DataSplit split_iid(const Dataset& full_train, const SplitPlan& plan) {
  plan.validate();
  const std::size_t n = full_train.rows();
  const std::size_t n_public = share_count(plan.kappa, n);
  const std::size_t n_part = share_count(plan.zeta, n);
  if (n_public + static_cast<std::size_t>(plan.partitions) * n_part > n)
    throw SplitError("infeasible split: kappa + zeta * partitions exceeds 1");

  std::mt19937_64 rng(plan.seed);
  auto idx = shuffled_indices(n, rng);
  DataSplit out;
  out.public_train = subset(full_train, std::span(idx).first(n_public), DatasetRole::public_train);
  std::size_t offset = n_public;
  for (std::uint32_t p = 0; p < plan.partitions; ++p) {
    out.private_parts.push_back(subset(full_train, std::span(idx).subspan(offset, n_part), DatasetRole::private_train));
    offset += n_part;
  }
  return out;
}

std::vector<Dataset> assign_private_parts(const std::vector<Dataset>& parts, std::uint32_t miners, std::uint64_t seed) {
  if (parts.empty()) throw SplitError("no private parts to assign");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
  std::vector<Dataset> out;
  out.reserve(miners);
  for (std::uint32_t i = 0; i < miners; ++i) out.push_back(i < parts.size() ? parts[i] : parts[pick(rng)]);
  return out;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0)) throw SplitError("largest_remainder needs positive total weight");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = weights[i] / sum * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  // Floating error can push the floor sum past total; trim from the largest.
  while (assigned > total) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

DataSplit split_dirichlet(const Dataset& full_train, const SplitPlan& plan, std::uint32_t miners) {
  plan.validate();
  if (miners == 0) throw SplitError("Dirichlet split needs at least one miner");
  const std::size_t n = full_train.rows();
  const std::size_t n_public = share_count(plan.kappa, n);

  std::mt19937_64 rng(plan.seed);
  auto idx = shuffled_indices(n, rng);
  DataSplit out;
  out.public_train = subset(full_train, std::span(idx).first(n_public), DatasetRole::public_train);

  // Private pool grouped by class, in shuffled order.
  std::vector<std::vector<std::size_t>> by_class(full_train.num_classes());
  for (std::size_t k = n_public; k < n; ++k) by_class[full_train.label(idx[k])].push_back(idx[k]);
  for (std::size_t c = 0; c < by_class.size(); ++c)
    if (by_class[c].empty()) throw SplitError("class " + std::to_string(c) + " has no private samples");

  std::gamma_distribution<double> gamma(plan.beta, 1.0);
  for (int attempt = 0; attempt < kMaxDirichletAttempts; ++attempt) {
    std::vector<std::vector<std::size_t>> assigned(miners);
    for (const auto& members : by_class) {
      std::vector<double> p(miners);
      double sum = 0.0;
      do {
        for (auto& v : p) v = gamma(rng);
        sum = std::accumulate(p.begin(), p.end(), 0.0);
      } while (!(sum > 0.0));
      auto counts = largest_remainder(p, members.size());
      std::size_t offset = 0;
      for (std::uint32_t j = 0; j < miners; ++j) {
        assigned[j].insert(assigned[j].end(), members.begin() + static_cast<std::ptrdiff_t>(offset),
                           members.begin() + static_cast<std::ptrdiff_t>(offset + counts[j]));
        offset += counts[j];
      }
    }
    if (std::any_of(assigned.begin(), assigned.end(), [](const auto& a) { return a.empty(); })) continue;
    for (auto& rows : assigned) out.private_parts.push_back(subset(full_train, rows, DatasetRole::private_train));
    return out;
  }
  throw SplitError("Dirichlet split left a miner without samples after " + std::to_string(kMaxDirichletAttempts) +
                   " attempts");
}

HoldoutSplit split_validation_test(const Dataset& held_out, std::uint64_t seed) {
  if (held_out.rows() < 2) throw SplitError("held-out set needs at least two samples");
  std::mt19937_64 rng(seed);
  auto idx = shuffled_indices(held_out.rows(), rng);
  const std::size_t n_val = held_out.rows() / 2;
  return {subset(held_out, std::span(idx).first(n_val), DatasetRole::validation),
          subset(held_out, std::span(idx).subspan(n_val), DatasetRole::test)};
}

}  // namespace bagchain::ml
