// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/merkle.hpp"

#include "bagchain/chain/encoding.hpp"

namespace bagchain {

HashDigest merkle_root(std::span<const std::vector<std::uint8_t>> leaves) {
  if (leaves.empty()) return HashDigest::zero();
  std::vector<HashDigest> level;
  level.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    Encoder enc;
    enc.u8(0x00).raw(leaf);
    level.push_back(enc.hash());
  }
  while (level.size() > 1) {
    std::vector<HashDigest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      Encoder enc;
      enc.u8(0x01).digest(level[i]).digest(level[i + 1]);
      next.push_back(enc.hash());
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

HashDigest payload_merkle_root(std::span<const PayloadRecord> records) {
  std::vector<std::vector<std::uint8_t>> leaves;
  leaves.reserve(records.size());
  for (const auto& r : records) leaves.push_back(r.encode());
  return merkle_root(leaves);
}

}  // namespace bagchain
