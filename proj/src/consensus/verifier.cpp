// SPDX-License-Identifier: Apache-2.0
#include "bagchain/consensus/verifier.hpp"

#include <algorithm>
#include <set>

#include "bagchain/chain/merkle.hpp"
#include "bagchain/chain/task_queue.hpp"
#include "bagchain/consensus/rules.hpp"
#include "bagchain/ml/bagging.hpp"

namespace bagchain::consensus {

namespace {
Verdict remember(std::unordered_map<HashDigest, Verdict, HashDigestHasher>& memo, const HashDigest& key, Verdict v) {
  if (!v.is_pending()) memo[key] = v;
  return v;
}

void merge_needs(std::vector<Need>& into, const Verdict& v) { into.insert(into.end(), v.needs.begin(), v.needs.end()); }
}  // namespace

Verifier::Verifier(const BlockStore& store, ModelCache& models, const TaskBoard& board, const PublishedData& published,
                   const ConsensusParams& params)
    : store_(store), models_(models), board_(board), published_(published), params_(params) {}

Verdict Verifier::miniblock(const MiniBlock& mb) {
  const auto digest = mb.digest();
  if (auto it = mb_memo_.find(digest); it != mb_memo_.end()) return it->second;

  const TaskEntry* entry = board_.for_height(mb.height);
  if (entry == nullptr) return remember(mb_memo_, digest, Verdict::invalid(Reason::wrong_height));
  if (mb.task_id != entry->id) return remember(mb_memo_, digest, Verdict::invalid(Reason::wrong_task));

  const Publication* dv = published_.validation(mb.height);
  if (dv == nullptr)
    return Verdict::pending(Reason::pending_dataset, {{Need::Kind::dataset, entry->id, 0, mb.height}});
  if (mb.timestamp >= dv->timestamp) return remember(mb_memo_, digest, Verdict::invalid(Reason::late_miniblock));

  const CachedModel* model = models_.get(mb.model_hash, mb.miner_id);
  if (model == nullptr)
    return Verdict::pending(Reason::pending_model, {{Need::Kind::model, mb.model_hash, mb.miner_id, mb.height}});

  if (ml::model_hash(*model->bytes, mb.miner_id) != mb.model_hash) {
    // Another miner already committed these parameters under its own ID.
    for (const auto& other : store_.miniblocks_at(mb.height)) {
      const MiniBlock* o = store_.miniblock(other);
      if (o->miner_id != mb.miner_id && o->model_hash == mb.model_hash)
        return remember(mb_memo_, digest, Verdict::invalid(Reason::plagiarized_model));
    }
    return remember(mb_memo_, digest, Verdict::invalid(Reason::ownership_mismatch));
  }
  const auto& data = *dv->data;
  if (model->tree == nullptr || model->tree->num_features() != data.cols() ||
      model->tree->num_classes() != data.num_classes())
    return remember(mb_memo_, digest, Verdict::invalid(Reason::malformed_model));

  const auto& pred = models_.predictions(*model, data, entry->task.val_commit, params_.exec);
  if (!(ml::metric(pred, data.labels()) > entry->task.metric_min))
    return remember(mb_memo_, digest, Verdict::invalid(Reason::underperforming));
  return remember(mb_memo_, digest, Verdict::valid());
}

Verdict Verifier::ensemble(const EnsembleBlock& eb, const std::optional<HashDigest>& parent) {
  const auto digest = eb.digest();
  const auto key = std::make_pair(digest, parent.value_or(HashDigest::zero()));
  if (auto it = eb_memo_.find(key); it != eb_memo_.end()) return it->second;
  auto finish = [&](Verdict v) {
    if (!v.is_pending()) eb_memo_[key] = v;
    return v;
  };

  if (!eb.well_formed()) return finish(Verdict::invalid(Reason::malformed_ensemble));
  const TaskEntry* entry = board_.for_height(eb.height);
  if (entry == nullptr) return finish(Verdict::invalid(Reason::wrong_height));
  if (eb.task_id != entry->id) return finish(Verdict::invalid(Reason::wrong_task));

  std::vector<Need> needs;
  std::vector<const MiniBlock*> mbs;
  for (const auto& h : eb.miniblock_hashes) {
    const MiniBlock* mb = store_.miniblock(h);
    if (mb == nullptr) {
      needs.push_back({Need::Kind::block, h, 0, eb.height});
      continue;
    }
    if (mb->height != eb.height) return finish(Verdict::invalid(Reason::wrong_height));
    if (mb->task_id != eb.task_id) return finish(Verdict::invalid(Reason::wrong_task));
    if (parent && mb->prehash != *parent) return finish(Verdict::invalid(Reason::wrong_parent));
    mbs.push_back(mb);
  }
  bool pending = !needs.empty();
  for (const auto* mb : mbs) {
    auto v = miniblock(*mb);
    if (v.is_invalid()) return finish(Verdict::invalid(Reason::invalid_miniblock));
    if (v.is_pending()) {
      pending = true;
      merge_needs(needs, v);
    }
  }
  if (pending) {
    bool model_missing = std::any_of(needs.begin(), needs.end(), [](const Need& n) { return n.kind == Need::Kind::model; });
    return Verdict::pending(model_missing ? Reason::pending_model : Reason::pending_block, std::move(needs));
  }

  std::set<HashDigest> omegas;
  for (const auto* mb : mbs)
    if (!omegas.insert(model_of(*mb)->omega_hash).second) return finish(Verdict::invalid(Reason::duplicate_model));

  auto metric = validation_metric(eb);
  if (!metric) return Verdict::pending(Reason::pending_dataset, {{Need::Kind::dataset, entry->id, 0, eb.height}});
  if (!metric->same_representation(eb.metric_v)) return finish(Verdict::invalid(Reason::metric_v_mismatch));
  if (!(eb.metric_v > entry->task.metric_min)) return finish(Verdict::invalid(Reason::ensemble_below_min));
  return finish(Verdict::valid());
}

std::optional<Fraction> Verifier::ensemble_metric(const EnsembleBlock& eb, const Publication* pub,
                                                  const HashDigest& key) {
  if (pub == nullptr) return std::nullopt;
  std::vector<const CachedModel*> models;
  for (const auto& h : eb.miniblock_hashes) {
    const MiniBlock* mb = store_.miniblock(h);
    if (mb == nullptr) return std::nullopt;
    const CachedModel* m = model_of(*mb);
    if (m == nullptr || m->tree == nullptr) return std::nullopt;
    models.push_back(m);
  }
  return models_.ensemble_accuracy(models, *pub->data, key, params_.exec);
}

std::optional<Fraction> Verifier::validation_metric(const EnsembleBlock& eb) {
  const TaskEntry* entry = board_.for_height(eb.height);
  if (entry == nullptr) return std::nullopt;
  return ensemble_metric(eb, published_.validation(eb.height), entry->task.val_commit);
}

std::optional<Fraction> Verifier::test_metric(const EnsembleBlock& eb) {
  const auto digest = eb.digest();
  if (auto it = test_memo_.find(digest); it != test_memo_.end()) return it->second;
  const TaskEntry* entry = board_.for_height(eb.height);
  if (entry == nullptr) return std::nullopt;
  auto m = ensemble_metric(eb, published_.test(eb.height), entry->task.test_commit);
  if (m) test_memo_[digest] = *m;
  return m;
}

Verdict Verifier::keyblock(const KeyBlock& kb) {
  const auto digest = kb.digest();
  if (auto it = kb_memo_.find(digest); it != kb_memo_.end()) return it->second;

  if (!meets_target(digest, params_.target)) return remember(kb_memo_, digest, Verdict::invalid(Reason::pow_failed));
  if (kb.height == 0) return remember(kb_memo_, digest, Verdict::invalid(Reason::wrong_height));
  const KeyBlock* parent = store_.keyblock(kb.prehash);
  if (parent == nullptr)
    return Verdict::pending(Reason::pending_parent, {{Need::Kind::parent, kb.prehash, 0, kb.height - 1}});
  if (kb.height != parent->height + 1) return remember(kb_memo_, digest, Verdict::invalid(Reason::wrong_height));

  if (parent->task_queue.empty() || kb.task_id != parent->task_queue.front())
    return remember(kb_memo_, digest, Verdict::invalid(Reason::wrong_task));
  const TaskEntry* entry = board_.find(kb.task_id);
  const TaskEntry* incoming = board_.incoming_at(kb.height);
  if (entry == nullptr || incoming == nullptr) return remember(kb_memo_, digest, Verdict::invalid(Reason::wrong_task));
  if (kb.task_queue != push_task_queue(parent->task_queue, kb.task_id, incoming->id))
    return remember(kb_memo_, digest, Verdict::invalid(Reason::queue_mismatch));

  if (!ranking_consistent(kb)) return remember(kb_memo_, digest, Verdict::invalid(Reason::ranking_inconsistent));

  if (published_.test(kb.height) == nullptr || published_.validation(kb.height) == nullptr)
    return Verdict::pending(Reason::pending_dataset, {{Need::Kind::dataset, kb.task_id, 0, kb.height}});

  std::vector<Need> needs;
  bool pending = false;
  const std::optional<HashDigest> rule = params_.cfs ? std::nullopt : std::optional<HashDigest>(kb.prehash);
  std::vector<const EnsembleBlock*> ebs;
  for (const auto& e : kb.eb_entries) {
    const EnsembleBlock* eb = store_.ensembleblock(e.ensemble);
    if (eb == nullptr) {
      pending = true;
      needs.push_back({Need::Kind::block, e.ensemble, 0, kb.height});
      continue;
    }
    if (eb->height != kb.height || eb->task_id != kb.task_id)
      return remember(kb_memo_, digest, Verdict::invalid(Reason::invalid_ensemble));
    auto v = ensemble(*eb, rule);
    if (v.is_invalid()) return remember(kb_memo_, digest, Verdict::invalid(Reason::invalid_ensemble));
    if (v.is_pending()) {
      pending = true;
      merge_needs(needs, v);
      continue;
    }
    ebs.push_back(eb);
  }
  if (pending) return Verdict::pending(Reason::pending_block, std::move(needs));

  for (std::size_t i = 0; i < ebs.size(); ++i) {
    auto m = test_metric(*ebs[i]);
    if (!m) return Verdict::pending(Reason::pending_model, {});
    if (!m->same_representation(kb.eb_entries[i].metric_e))
      return remember(kb_memo_, digest, Verdict::invalid(Reason::metric_e_mismatch));
  }

  std::vector<MinerId> producers;
  if (!ebs.empty()) {
    std::vector<HashDigest> votes;
    for (const auto& h : ebs.front()->miniblock_hashes) {
      const MiniBlock* mb = store_.miniblock(h);
      producers.push_back(mb->miner_id);
      votes.push_back(mb->prehash);
    }
    if (params_.cfs && plurality_parent(votes) != kb.prehash)
      return remember(kb_memo_, digest, Verdict::invalid(Reason::prehash_vote_mismatch));
  }

  if (payload_merkle_root(kb.payload) != kb.merkle_root)
    return remember(kb_memo_, digest, Verdict::invalid(Reason::merkle_mismatch));
  if (kb.payload != allocate_rewards(producers, entry->task.fee, kb.miner_id, params_.keyblock_reward))
    return remember(kb_memo_, digest, Verdict::invalid(Reason::payload_mismatch));
  return remember(kb_memo_, digest, Verdict::valid());
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::ok: return "ok";
    case Reason::pending_model: return "pending_model";
    case Reason::pending_block: return "pending_block";
    case Reason::pending_dataset: return "pending_dataset";
    case Reason::pending_parent: return "pending_parent";
    case Reason::wrong_task: return "wrong_task";
    case Reason::wrong_height: return "wrong_height";
    case Reason::wrong_parent: return "wrong_parent";
    case Reason::late_miniblock: return "late_miniblock";
    case Reason::ownership_mismatch: return "ownership_mismatch";
    case Reason::plagiarized_model: return "plagiarized_model";
    case Reason::malformed_model: return "malformed_model";
    case Reason::underperforming: return "underperforming";
    case Reason::malformed_ensemble: return "malformed_ensemble";
    case Reason::invalid_miniblock: return "invalid_miniblock";
    case Reason::duplicate_model: return "duplicate_model";
    case Reason::metric_v_mismatch: return "metric_v_mismatch";
    case Reason::ensemble_below_min: return "ensemble_below_min";
    case Reason::pow_failed: return "pow_failed";
    case Reason::ranking_inconsistent: return "ranking_inconsistent";
    case Reason::queue_mismatch: return "queue_mismatch";
    case Reason::invalid_ensemble: return "invalid_ensemble";
    case Reason::metric_e_mismatch: return "metric_e_mismatch";
    case Reason::prehash_vote_mismatch: return "prehash_vote_mismatch";
    case Reason::merkle_mismatch: return "merkle_mismatch";
    case Reason::payload_mismatch: return "payload_mismatch";
  }
  return "unknown";
}

}  // namespace bagchain::consensus
