// SPDX-License-Identifier: Apache-2.0
#include "fixture.hpp"

#include <algorithm>
#include <numeric>

#include "bagchain/chain/merkle.hpp"
#include "bagchain/chain/seed.hpp"
#include "bagchain/consensus/rules.hpp"
#include "bagchain/ml/bagging.hpp"
#include "bagchain/ml/split.hpp"
#include "bagchain/ml/synth.hpp"

namespace bagchain::testing {

using consensus::TaskEntry;

std::shared_ptr<const consensus::TaskBoard> make_board(const FixtureConfig& cfg) {
  auto all = ml::synthesize_dataset({cfg.samples, cfg.features, cfg.classes, cfg.separation, cfg.seed});
  std::vector<std::size_t> idx(all.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t n_train = all.rows() * 2 / 3;
  std::span<const std::size_t> rows(idx);
  auto train = std::make_shared<const ml::Dataset>(ml::subset(all, rows.first(n_train), ml::DatasetRole::public_train));
  auto held = ml::subset(all, rows.subspan(n_train), ml::DatasetRole::held_out);

  std::vector<TaskEntry> pool;
  for (std::size_t k = 0; k < cfg.heights + cfg.queue_length; ++k) {
    auto halves = ml::split_validation_test(held, derive_seed(cfg.seed, "fixture-task", {k}));
    TaskEntry e;
    e.validation = std::make_shared<const ml::Dataset>(std::move(halves.validation));
    e.test = std::make_shared<const ml::Dataset>(std::move(halves.test));
    e.task.train_commit = ml::commitment(*train);
    e.task.val_commit = ml::commitment(*e.validation);
    e.task.test_commit = ml::commitment(*e.test);
    e.task.metric_min = cfg.metric_min;
    e.task.fee = cfg.fee;
    e.task.requester_id = 1000;
    e.id = e.task.id();
    pool.push_back(std::move(e));
  }
  return std::make_shared<const consensus::TaskBoard>(train, std::move(pool), cfg.queue_length);
}

namespace {
consensus::ConsensusParams params_for(const FixtureConfig& cfg) {
  consensus::ConsensusParams p;
  p.target = target_from_exponent(cfg.target_exponent);
  p.cfs = cfg.cfs;
  return p;
}
}  // namespace

Fixture::Fixture(FixtureConfig c)
    : cfg(c),
      board(make_board(cfg)),
      params(params_for(cfg)),
      store(board->genesis()),
      verifier(store, models, *board, published, params) {}

void Fixture::publish(Height h, Round t_v, Round t_e) {
  published.set_validation(h, {task(h).validation, t_v});
  published.set_test(h, {task(h).test, t_e});
}

ml::TrainedModel Fixture::train_model(MinerId owner, std::uint64_t variant, std::uint32_t max_depth) const {
  ml::LearnerSpec spec;
  spec.max_depth = max_depth;
  auto data = ml::resample(board->public_train(), derive_seed(cfg.seed, "fixture-model", {owner, variant}));
  return ml::bind_model(ml::train(data, spec), owner);
}

MiniBlock Fixture::add_miniblock(const ml::TrainedModel& model, const HashDigest& parent, Round ts) {
  const KeyBlock* p = store.keyblock(parent);
  MiniBlock mb;
  mb.timestamp = ts;
  mb.height = p->height + 1;
  mb.task_id = task(mb.height).id;
  mb.model_hash = model.model_hash;
  mb.miner_id = model.owner;
  mb.prehash = parent;
  models.put_local(model);
  store.add_miniblock(mb);
  return mb;
}

EnsembleBlock Fixture::add_ensemble(const std::vector<MiniBlock>& mbs, MinerId miner, Round ts) {
  EnsembleBlock eb;
  eb.miner_id = miner;
  eb.timestamp = ts;
  eb.height = mbs.front().height;
  eb.task_id = mbs.front().task_id;
  std::vector<const consensus::CachedModel*> ms;
  for (const auto& mb : mbs) {
    eb.miniblock_hashes.push_back(mb.digest());
    ms.push_back(models.get(mb.model_hash, mb.miner_id));
  }
  std::sort(eb.miniblock_hashes.begin(), eb.miniblock_hashes.end());
  const auto& entry = task(eb.height);
  eb.metric_v = models.ensemble_accuracy(ms, *entry.validation, entry.task.val_commit, params.exec);
  store.add_ensembleblock(eb);
  return eb;
}

KeyBlock Fixture::make_keyblock(const HashDigest& parent, const std::vector<EnsembleBlock>& ebs, MinerId miner,
                                Round ts) {
  const KeyBlock& p = *store.keyblock(parent);
  const Height h = p.height + 1;
  const auto& entry = task(h);
  std::vector<RankedEnsemble> entries;
  for (const auto& eb : ebs) {
    std::vector<const consensus::CachedModel*> ms;
    for (const auto& d : eb.miniblock_hashes) {
      const MiniBlock* mb = store.miniblock(d);
      ms.push_back(models.get(mb->model_hash, mb->miner_id));
    }
    auto acc = models.ensemble_accuracy(ms, *entry.test, entry.task.test_commit, params.exec);
    entries.push_back({eb.digest(), acc});
  }
  consensus::rank_entries(entries);

  std::vector<MinerId> producers;
  if (!entries.empty()) {
    const EnsembleBlock* winner = store.ensembleblock(entries.front().ensemble);
    for (const auto& d : winner->miniblock_hashes) producers.push_back(store.miniblock(d)->miner_id);
  }
  auto payload = consensus::allocate_rewards(producers, entry.task.fee, miner, params.keyblock_reward);
  auto kb = consensus::assemble_keyblock(p, parent, entry.id, board->incoming_at(h)->id, std::move(entries),
                                         std::move(payload), miner, ts);
  regrind(kb);
  return kb;
}

void Fixture::regrind(KeyBlock& kb) const {
  kb.merkle_root = payload_merkle_root(kb.payload);
  kb.nonce = 0;
  while (!meets_target(kb.digest(), params.target)) ++kb.nonce;
}

void Fixture::break_pow(KeyBlock& kb) const {
  while (meets_target(kb.digest(), params.target)) ++kb.nonce;
}

}  // namespace bagchain::testing
