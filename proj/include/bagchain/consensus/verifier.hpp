// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <utility>

#include "bagchain/chain/block_store.hpp"
#include "bagchain/consensus/model_cache.hpp"
#include "bagchain/consensus/params.hpp"
#include "bagchain/consensus/task_board.hpp"
#include "bagchain/consensus/verdict.hpp"

namespace bagchain::consensus {

/// Block validation against one miner's view (store, fetched models,
/// received datasets). Final verdicts are memoised; pending ones are not.
class Verifier {
 public:
  Verifier(const BlockStore& store, ModelCache& models, const TaskBoard& board, const PublishedData& published,
           const ConsensusParams& params);

  /// Task, timing, ownership and metric floor. Does not look at the prehash.
  Verdict miniblock(const MiniBlock& mb);
  /// With `parent` set every MiniBlock must point to it; with nullopt the
  /// cross-fork rule applies (same height and task, distinct parameters).
  Verdict ensemble(const EnsembleBlock& eb, const std::optional<HashDigest>& parent);
  /// Everything except the parent's own validity, which is implied by the
  /// parent being in the store.
  Verdict keyblock(const KeyBlock& kb);

  /// Accuracy of the ensemble's majority vote on D_E of its height, or
  /// nullopt while models or the dataset are missing.
  std::optional<Fraction> test_metric(const EnsembleBlock& eb);
  /// Same on D_V.
  std::optional<Fraction> validation_metric(const EnsembleBlock& eb);

  [[nodiscard]] const CachedModel* model_of(const MiniBlock& mb) const { return models_.get(mb.model_hash, mb.miner_id); }

 private:
  std::optional<Fraction> ensemble_metric(const EnsembleBlock& eb, const Publication* pub, const HashDigest& key);

  const BlockStore& store_;
  ModelCache& models_;
  const TaskBoard& board_;
  const PublishedData& published_;
  const ConsensusParams& params_;

  std::unordered_map<HashDigest, Verdict, HashDigestHasher> mb_memo_;
  std::map<std::pair<HashDigest, HashDigest>, Verdict> eb_memo_;
  std::unordered_map<HashDigest, Verdict, HashDigestHasher> kb_memo_;
  std::unordered_map<HashDigest, Fraction, HashDigestHasher> test_memo_;
};

}  // namespace bagchain::consensus
