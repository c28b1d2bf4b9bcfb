// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"

namespace bagchain::consensus {

/// Fee split evenly over `producers` (one entry per referenced MiniBlock),
/// sorted by payee; the fee mod n leftover units go one each to the first
/// records in payee order. A keyblock-reward record for `keyblock_miner`
/// comes last. No producers means the fee is not paid out.
std::vector<PayloadRecord> allocate_rewards(std::vector<MinerId> producers, std::uint64_t fee, MinerId keyblock_miner,
                                            std::uint64_t keyblock_reward);

/// Most frequent parent among MiniBlock prehashes; ties go to the smaller digest.
/// Throws std::invalid_argument on an empty input.
HashDigest plurality_parent(std::span<const HashDigest> prehashes);

/// Sorts by metric_e descending, then digest ascending.
void rank_entries(std::vector<RankedEnsemble>& entries);

/// KeyBlock on `parent` completing `task` and appending `incoming`, with
/// metric_best taken from the ranked entries and merkle_root over `payload`.
KeyBlock assemble_keyblock(const KeyBlock& parent, const HashDigest& parent_digest, const HashDigest& task,
                           const HashDigest& incoming, std::vector<RankedEnsemble> entries,
                           std::vector<PayloadRecord> payload, MinerId miner, Round now);

/// Nonce grinding over a fixed candidate: only the nonce and timestamp bytes
/// of the encoded header change between trials.
class PowSearch {
 public:
  explicit PowSearch(KeyBlock candidate);

  /// Runs `trials` nonces starting at `next_nonce` (advanced past each trial).
  /// On success the block carries the winning nonce and `now` as timestamp.
  bool attempt(Round now, std::uint64_t trials, const HashDigest& target, std::uint64_t& next_nonce);
  [[nodiscard]] const KeyBlock& block() const { return block_; }

 private:
  KeyBlock block_;
  std::vector<std::uint8_t> header_;
};

}  // namespace bagchain::consensus
