// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bagchain/chain/hash.hpp"
#include "bagchain/ml/tree.hpp"

namespace bagchain::ml {

/// A trained tree bound to the miner that owns it.
struct TrainedModel {
  DecisionTree tree;
  std::uint32_t owner = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;  // tree.serialize()
  HashDigest model_hash;  // Hash(bytes || owner)
  HashDigest omega_hash;  // Hash(bytes), identical for copies of the same parameters
};

/// Hash(parameters || u32 owner).
HashDigest model_hash(std::span<const std::uint8_t> parameters, std::uint32_t owner);

TrainedModel bind_model(DecisionTree tree, std::uint32_t owner);

}  // namespace bagchain::ml
