// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bagchain/chain/hash.hpp"

namespace bagchain {

/// Drops the head (which must equal `completed`) and appends `incoming`.
/// Throws ProtocolViolation on an empty queue or a head mismatch.
std::vector<HashDigest> push_task_queue(const std::vector<HashDigest>& queue, const HashDigest& completed,
                                        const HashDigest& incoming);

}  // namespace bagchain
