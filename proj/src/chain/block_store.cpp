// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/block_store.hpp"

#include <algorithm>

namespace bagchain {

namespace {
const std::vector<HashDigest> kEmpty;

const std::vector<HashDigest>& lookup(const std::map<Height, std::vector<HashDigest>>& index, Height h) {
  auto it = index.find(h);
  return it == index.end() ? kEmpty : it->second;
}
}  // namespace

bool prefer_tip(const KeyBlock& a, const HashDigest& da, const KeyBlock& b, const HashDigest& db) {
  if (a.height != b.height) return a.height > b.height;
  if (a.metric_best != b.metric_best) return a.metric_best > b.metric_best;
  return da < db;
}

BlockStore::BlockStore(const KeyBlock& genesis) : genesis_(genesis.digest()), best_(genesis_) {
  keyblocks_.emplace(genesis_, genesis);
  kb_by_height_[genesis.height].push_back(genesis_);
}

const KeyBlock* BlockStore::keyblock(const HashDigest& d) const {
  auto it = keyblocks_.find(d);
  return it == keyblocks_.end() ? nullptr : &it->second;
}

bool BlockStore::add_keyblock(const KeyBlock& kb) {
  auto d = kb.digest();
  if (keyblocks_.count(d)) return false;
  const KeyBlock* parent = keyblock(kb.prehash);
  if (parent == nullptr) throw ProtocolViolation("parent KeyBlock " + kb.prehash.short_hex() + " is not stored");
  if (kb.height != parent->height + 1) throw ProtocolViolation("KeyBlock height must be parent height + 1");
  auto [it, inserted] = keyblocks_.emplace(d, kb);
  children_[kb.prehash].push_back(d);
  kb_by_height_[kb.height].push_back(d);
  if (prefer_tip(it->second, d, keyblocks_.at(best_), best_)) best_ = d;
  return inserted;
}

const std::vector<HashDigest>& BlockStore::keyblocks_at(Height h) const { return lookup(kb_by_height_, h); }

const std::vector<HashDigest>& BlockStore::children(const HashDigest& d) const {
  auto it = children_.find(d);
  return it == children_.end() ? kEmpty : it->second;
}

void BlockStore::add_orphan(const KeyBlock& kb) {
  auto d = kb.digest();
  if (keyblocks_.count(d) || is_orphan(d)) return;
  orphans_[kb.prehash].push_back(kb);
}

bool BlockStore::is_orphan(const HashDigest& d) const {
  for (const auto& [parent, list] : orphans_)
    for (const auto& kb : list)
      if (kb.digest() == d) return true;
  return false;
}

std::vector<KeyBlock> BlockStore::take_orphans(const HashDigest& parent) {
  auto it = orphans_.find(parent);
  if (it == orphans_.end()) return {};
  auto out = std::move(it->second);
  orphans_.erase(it);
  return out;
}

std::size_t BlockStore::orphan_count() const {
  std::size_t n = 0;
  for (const auto& [parent, list] : orphans_) n += list.size();
  return n;
}

std::vector<HashDigest> BlockStore::chain_to(const HashDigest& tip) const {
  std::vector<HashDigest> out;
  const KeyBlock* kb = keyblock(tip);
  HashDigest d = tip;
  while (kb != nullptr) {
    out.push_back(d);
    if (kb->height == 0) break;
    d = kb->prehash;
    kb = keyblock(d);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool BlockStore::is_ancestor(const HashDigest& ancestor, const HashDigest& descendant) const {
  const KeyBlock* a = keyblock(ancestor);
  const KeyBlock* kb = keyblock(descendant);
  if (a == nullptr || kb == nullptr) return false;
  HashDigest d = descendant;
  while (kb != nullptr && kb->height > a->height) {
    d = kb->prehash;
    kb = keyblock(d);
  }
  return kb != nullptr && d == ancestor;
}

bool BlockStore::add_miniblock(const MiniBlock& mb) {
  auto d = mb.digest();
  if (!miniblocks_.emplace(d, mb).second) return false;
  mb_by_height_[mb.height].push_back(d);
  return true;
}

const MiniBlock* BlockStore::miniblock(const HashDigest& d) const {
  auto it = miniblocks_.find(d);
  return it == miniblocks_.end() ? nullptr : &it->second;
}

const std::vector<HashDigest>& BlockStore::miniblocks_at(Height h) const { return lookup(mb_by_height_, h); }

bool BlockStore::add_ensembleblock(const EnsembleBlock& eb) {
  auto d = eb.digest();
  if (!ensembleblocks_.emplace(d, eb).second) return false;
  eb_by_height_[eb.height].push_back(d);
  return true;
}

const EnsembleBlock* BlockStore::ensembleblock(const HashDigest& d) const {
  auto it = ensembleblocks_.find(d);
  return it == ensembleblocks_.end() ? nullptr : &it->second;
}

const std::vector<HashDigest>& BlockStore::ensembleblocks_at(Height h) const { return lookup(eb_by_height_, h); }

}  // namespace bagchain
