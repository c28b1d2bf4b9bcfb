// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "bagchain/ml/dataset.hpp"

namespace bagchain::ml {

enum class Heterogeneity { iid, dirichlet };

struct SplitPlan {
  double kappa = 0.4;        // |D_T| / |full train|
  double zeta = 0.06;        // per-partition private share (IID)
  std::uint32_t partitions = 10;  // number of IID private subsets
  Heterogeneity heterogeneity = Heterogeneity::iid;
  double beta = 0.5;         // Dirichlet concentration
  std::uint64_t seed = 0;

  /// Throws SplitError on kappa outside (0,1], negative zeta, beta <= 0.
  void validate() const;
};

class SplitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DataSplit {
  Dataset public_train;
  std::vector<Dataset> private_parts;
};

/// floor(ratio * n), tolerant of representation error in the ratio.
std::size_t share_count(double ratio, std::size_t n);

/// Public part of size floor(kappa n) and `partitions` disjoint private parts
/// of size floor(zeta n), all drawn from one seeded shuffle.
DataSplit split_iid(const Dataset& full_train, const SplitPlan& plan);

/// Private part i goes to miner i for i < partitions; later miners reuse a
/// uniformly drawn part.
std::vector<Dataset> assign_private_parts(const std::vector<Dataset>& parts, std::uint32_t miners, std::uint64_t seed);

/// Public part as in split_iid; the remaining samples are partitioned class by
/// class with proportions drawn from Dir_N(beta), largest-remainder rounding.
/// Redraws when a miner would receive no samples (at most 20 attempts).
DataSplit split_dirichlet(const Dataset& full_train, const SplitPlan& plan, std::uint32_t miners);

/// Largest-remainder apportionment of `total` items by `weights` (sum > 0).
/// Ties in remainder go to the smaller index.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total);

struct HoldoutSplit {
  Dataset validation;
  Dataset test;
};

/// Random halving of the held-out set: |validation| = floor(n/2).
HoldoutSplit split_validation_test(const Dataset& held_out, std::uint64_t seed);

}  // namespace bagchain::ml
