// SPDX-License-Identifier: Apache-2.0
#include "bagchain/consensus/rules.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "bagchain/chain/merkle.hpp"
#include "bagchain/chain/task_queue.hpp"

namespace bagchain::consensus {

namespace {
void put_be64(std::vector<std::uint8_t>& buf, std::size_t offset, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    buf[offset + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
}
}  // namespace

std::vector<PayloadRecord> allocate_rewards(std::vector<MinerId> producers, std::uint64_t fee, MinerId keyblock_miner,
                                            std::uint64_t keyblock_reward) {
  std::vector<PayloadRecord> out;
  if (!producers.empty()) {
    std::sort(producers.begin(), producers.end());
    const std::uint64_t n = producers.size();
    const std::uint64_t share = fee / n;
    const std::uint64_t extra = fee % n;
    for (std::uint64_t i = 0; i < n; ++i)
      out.push_back({PayloadKind::training_fee_share, producers[i], share + (i < extra ? 1 : 0)});
  }
  out.push_back({PayloadKind::keyblock_reward, keyblock_miner, keyblock_reward});
  return out;
}

HashDigest plurality_parent(std::span<const HashDigest> prehashes) {
  if (prehashes.empty()) throw std::invalid_argument("plurality vote over no MiniBlocks");
  std::map<HashDigest, std::size_t> votes;
  for (const auto& p : prehashes) ++votes[p];
  // std::map iterates in ascending digest order, so the first maximum wins ties.
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

void rank_entries(std::vector<RankedEnsemble>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedEnsemble& a, const RankedEnsemble& b) {
    if (a.metric_e != b.metric_e) return a.metric_e > b.metric_e;
    return a.ensemble < b.ensemble;
  });
}

KeyBlock assemble_keyblock(const KeyBlock& parent, const HashDigest& parent_digest, const HashDigest& task,
                           const HashDigest& incoming, std::vector<RankedEnsemble> entries,
                           std::vector<PayloadRecord> payload, MinerId miner, Round now) {
  KeyBlock kb;
  rank_entries(entries);
  kb.metric_best = entries.empty() ? Fraction{0, 1} : entries.front().metric_e;
  kb.eb_entries = std::move(entries);
  kb.merkle_root = payload_merkle_root(payload);
  kb.payload = std::move(payload);
  kb.timestamp = now;
  kb.miner_id = miner;
  kb.task_id = task;
  kb.task_queue = push_task_queue(parent.task_queue, task, incoming);
  kb.prehash = parent_digest;
  kb.height = parent.height + 1;
  return kb;
}

PowSearch::PowSearch(KeyBlock candidate) : block_(std::move(candidate)), header_(block_.encode_header()) {}

bool PowSearch::attempt(Round now, std::uint64_t trials, const HashDigest& target, std::uint64_t& next_nonce) {
  put_be64(header_, KeyBlock::kTimestampOffset, now);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t nonce = next_nonce++;
    put_be64(header_, KeyBlock::kNonceOffset, nonce);
    if (meets_target(canonical_hash(header_), target)) {
      block_.nonce = nonce;
      block_.timestamp = now;
      return true;
    }
  }
  return false;
}

}  // namespace bagchain::consensus
