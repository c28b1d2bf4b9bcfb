// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"

namespace bagchain {

/// Fork choice: the higher tip wins, then the larger metric_best, then the
/// smaller digest. Returns true when (a, da) is preferred over (b, db).
bool prefer_tip(const KeyBlock& a, const HashDigest& da, const KeyBlock& b, const HashDigest& db);

/// One miner's replica of the block tree plus per-height MiniBlock and
/// EnsembleBlock indices. KeyBlocks whose parent is not stored yet wait in
/// the orphan buffer until the parent is added.
class BlockStore {
 public:
  explicit BlockStore(const KeyBlock& genesis);

  [[nodiscard]] const HashDigest& genesis_digest() const { return genesis_; }

  [[nodiscard]] bool has_keyblock(const HashDigest& d) const { return keyblocks_.count(d) != 0; }
  [[nodiscard]] const KeyBlock* keyblock(const HashDigest& d) const;
  /// Parent must already be stored and the height must be parent + 1
  /// (ProtocolViolation otherwise). Returns false for a known block.
  bool add_keyblock(const KeyBlock& kb);
  [[nodiscard]] const std::vector<HashDigest>& keyblocks_at(Height h) const;
  [[nodiscard]] const std::vector<HashDigest>& children(const HashDigest& d) const;
  [[nodiscard]] std::size_t keyblock_count() const { return keyblocks_.size(); }

  void add_orphan(const KeyBlock& kb);
  [[nodiscard]] bool is_orphan(const HashDigest& d) const;
  /// Removes and returns the orphans waiting on `parent`, in arrival order.
  std::vector<KeyBlock> take_orphans(const HashDigest& parent);
  [[nodiscard]] std::size_t orphan_count() const;

  /// Tip selected by prefer_tip over every stored KeyBlock.
  [[nodiscard]] const HashDigest& best_tip() const { return best_; }
  /// Genesis first, best tip last.
  [[nodiscard]] std::vector<HashDigest> main_chain() const { return chain_to(best_); }
  [[nodiscard]] std::vector<HashDigest> chain_to(const HashDigest& tip) const;
  [[nodiscard]] bool is_ancestor(const HashDigest& ancestor, const HashDigest& descendant) const;

  bool add_miniblock(const MiniBlock& mb);
  [[nodiscard]] const MiniBlock* miniblock(const HashDigest& d) const;
  [[nodiscard]] const std::vector<HashDigest>& miniblocks_at(Height h) const;

  bool add_ensembleblock(const EnsembleBlock& eb);
  [[nodiscard]] const EnsembleBlock* ensembleblock(const HashDigest& d) const;
  [[nodiscard]] const std::vector<HashDigest>& ensembleblocks_at(Height h) const;

 private:
  using DigestMap = std::unordered_map<HashDigest, std::vector<HashDigest>, HashDigestHasher>;

  HashDigest genesis_;
  HashDigest best_;
  std::unordered_map<HashDigest, KeyBlock, HashDigestHasher> keyblocks_;
  DigestMap children_;
  std::map<Height, std::vector<HashDigest>> kb_by_height_;
  std::unordered_map<HashDigest, std::vector<KeyBlock>, HashDigestHasher> orphans_;

  std::unordered_map<HashDigest, MiniBlock, HashDigestHasher> miniblocks_;
  std::map<Height, std::vector<HashDigest>> mb_by_height_;
  std::unordered_map<HashDigest, EnsembleBlock, HashDigestHasher> ensembleblocks_;
  std::map<Height, std::vector<HashDigest>> eb_by_height_;
};

}  // namespace bagchain
