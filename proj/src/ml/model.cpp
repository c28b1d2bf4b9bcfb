// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/model.hpp"

#include "bagchain/chain/encoding.hpp"

namespace bagchain::ml {

HashDigest model_hash(std::span<const std::uint8_t> parameters, std::uint32_t owner) {
  Encoder enc;
  enc.raw(parameters).u32(owner);
  return enc.hash();
}

TrainedModel bind_model(DecisionTree tree, std::uint32_t owner) {
  TrainedModel m;
  auto bytes = std::make_shared<const std::vector<std::uint8_t>>(tree.serialize());
  m.tree = std::move(tree);
  m.owner = owner;
  m.model_hash = model_hash(*bytes, owner);
  m.omega_hash = canonical_hash(*bytes);
  m.bytes = std::move(bytes);
  return m;
}

}  // namespace bagchain::ml
