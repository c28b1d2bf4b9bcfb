// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"

namespace bagchain {

// Leaves are H(0x00 || record), interior nodes H(0x01 || left || right). An
// unpaired node is promoted to the next level unchanged. No leaves gives the
// zero digest.
HashDigest merkle_root(std::span<const std::vector<std::uint8_t>> leaves);
HashDigest payload_merkle_root(std::span<const PayloadRecord> records);

}  // namespace bagchain
