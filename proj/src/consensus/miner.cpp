// SPDX-License-Identifier: Apache-2.0
#include "bagchain/consensus/miner.hpp"

#include <algorithm>

#include "bagchain/chain/seed.hpp"
#include "bagchain/ml/bagging.hpp"

namespace bagchain::consensus {

using net::Payload;

namespace {
MinerEvent make_event(MinerEvent::Kind kind, Round now, Height h, const HashDigest& d, Reason reason = Reason::ok) {
  MinerEvent ev;
  ev.kind = kind;
  ev.round = now;
  ev.height = h;
  ev.digest = d;
  ev.reason = reason;
  return ev;
}
}  // namespace

Miner::Miner(MinerConfig config, const ConsensusParams& params, const TaskBoard& board,
             const ml::Dataset& private_data)
    : cfg_(config),
      params_(params),
      board_(board),
      local_train_(private_data.empty() ? board.public_train()
                                        : ml::concat(board.public_train(), private_data, ml::DatasetRole::private_train)),
      store_(board.genesis()),
      verifier_(store_, models_, board_, published_, params_),
      tip_(store_.genesis_digest()) {
  seen_.insert(tip_);
}

Phase Miner::phase() const {
  const Height h = store_.keyblock(tip_)->height + 1;
  if (published_.test(h)) return Phase::mining;
  if (published_.validation(h)) return Phase::ensembling;
  return Phase::training;
}

Round Miner::phase_anchor() const {
  const Height h = store_.keyblock(tip_)->height + 1;
  auto received = [&](const std::map<Height, Round>& m) { return m.count(h) ? m.at(h) : Round{0}; };
  switch (phase()) {
    case Phase::mining: return std::max(tip_round_, received(de_received_));
    case Phase::ensembling: return std::max(tip_round_, received(dv_received_));
    case Phase::training: break;
  }
  return tip_round_;
}

std::shared_ptr<const ml::TrainedModel> Miner::own_model(Height h) {
  if (auto it = own_models_.find(h); it != own_models_.end()) return it->second;
  const TaskEntry* entry = board_.for_height(h);
  if (entry == nullptr) throw std::out_of_range("no task scheduled at this height");
  auto sample = ml::resample(local_train_, derive_seed(cfg_.seed, "bootstrap", {cfg_.id, h}));
  auto model = std::make_shared<const ml::TrainedModel>(
      ml::bind_model(ml::train(sample, entry->task.learner_spec, params_.exec), cfg_.id));
  own_models_[h] = model;
  own_model_heights_[model->model_hash] = h;
  models_.put_local(*model);
  return model;
}

void Miner::emit(StepOutput& out, MinerEvent ev) const {
  ev.miner = cfg_.id;
  out.events.push_back(std::move(ev));
}

void Miner::relay(const Payload& p, net::NodeId src, StepOutput& out) {
  if (!cfg_.relay) return;
  out.messages.push_back({Outbound::Mode::broadcast, p, 0, src});
}

StepOutput Miner::step(Round now, std::span<const net::Message> inbox) {
  StepOutput out;
  for (const auto& msg : inbox) receive(now, msg, out);
  // A deferred fetch whose back-off has expired is forgotten so the next
  // validation pass asks again.
  for (auto it = fetches_.begin(); it != fetches_.end();) {
    if (!it->second.in_flight && it->second.retry_at <= now) {
      dirty_ = true;
      it = fetches_.erase(it);
    } else {
      ++it;
    }
  }
  if (dirty_) process_pending_keyblocks(now, out);
  act(now, out);
  dirty_ = false;
  return out;
}

void Miner::receive(Round now, const net::Message& msg, StepOutput& out) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MiniBlock>) {
          on_miniblock(now, p, msg.src, out);
        } else if constexpr (std::is_same_v<T, EnsembleBlock>) {
          on_ensemble(now, p, msg.src, out);
        } else if constexpr (std::is_same_v<T, KeyBlock>) {
          on_keyblock(now, p, msg.src, out);
        } else if constexpr (std::is_same_v<T, net::DatasetPublication>) {
          on_publication(now, p, out);
        } else if constexpr (std::is_same_v<T, net::FetchRequest>) {
          on_fetch_request(p, out);
        } else if constexpr (std::is_same_v<T, net::FetchResponse>) {
          if (p.model_bytes) models_.put(p.model_hash, p.owner, p.model_bytes);
          fetches_.erase({p.model_hash, p.owner});
          dirty_ = true;
        } else if constexpr (std::is_same_v<T, net::FetchDeferred>) {
          auto& st = fetches_[{p.model_hash, p.owner}];
          st.in_flight = false;
          st.retry_at = now + params_.fetch_retry;
        }
      },
      msg.payload);
}

void Miner::on_miniblock(Round now, const MiniBlock& mb, net::NodeId src, StepOutput& out) {
  const auto d = mb.digest();
  if (!seen_.insert(d).second) return;
  if (mb.height == 0) {
    ++dropped_;
    emit(out, make_event(MinerEvent::Kind::dropped, now, mb.height, d, Reason::wrong_height));
    return;
  }
  // MiniBlocks stamped at or after the D_V publication are refused outright.
  if (const auto* dv = published_.validation(mb.height); dv != nullptr && mb.timestamp >= dv->timestamp) {
    ++rejected_;
    emit(out, make_event(MinerEvent::Kind::rejected, now, mb.height, d, Reason::late_miniblock));
    return;
  }
  store_.add_miniblock(mb);
  relay(mb, src, out);
  dirty_ = true;
}

void Miner::on_ensemble(Round now, const EnsembleBlock& eb, net::NodeId src, StepOutput& out) {
  const auto d = eb.digest();
  if (!seen_.insert(d).second) return;
  if (!eb.well_formed() || eb.height == 0) {
    ++dropped_;
    emit(out, make_event(MinerEvent::Kind::dropped, now, eb.height, d, Reason::malformed_ensemble));
    return;
  }
  store_.add_ensembleblock(eb);
  relay(eb, src, out);
  dirty_ = true;
}

void Miner::on_keyblock(Round now, const KeyBlock& kb, net::NodeId src, StepOutput& out) {
  const auto d = kb.digest();
  if (!seen_.insert(d).second) return;
  if (!meets_target(d, params_.target) || kb.height == 0) {
    ++dropped_;
    emit(out, make_event(MinerEvent::Kind::dropped, now, kb.height, d, Reason::pow_failed));
    return;
  }
  relay(kb, src, out);
  if (!store_.has_keyblock(kb.prehash)) {
    store_.add_orphan(kb);
    return;
  }
  pending_keyblocks_.push_back(kb);
  dirty_ = true;
}

void Miner::on_publication(Round now, const net::DatasetPublication& pub, StepOutput& out) {
  const TaskEntry* entry = board_.for_height(pub.height);
  const bool is_val = pub.kind == net::DatasetKind::validation;
  if (entry == nullptr || pub.task_id != entry->id || !pub.data ||
      ml::commitment(*pub.data) != (is_val ? entry->task.val_commit : entry->task.test_commit)) {
    ++dropped_;
    emit(out, make_event(MinerEvent::Kind::dropped, now, pub.height, pub.digest(), Reason::wrong_task));
    return;
  }
  Publication p{pub.data, pub.timestamp};
  if (is_val) {
    published_.set_validation(pub.height, p);
    dv_received_.emplace(pub.height, now);
  } else {
    published_.set_test(pub.height, p);
    de_received_.emplace(pub.height, now);
  }
  dirty_ = true;
}

void Miner::on_fetch_request(const net::FetchRequest& req, StepOutput& out) {
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
  if (cfg_.strategy != Strategy::withholder) {
    if (auto it = own_model_heights_.find(req.model_hash); it != own_model_heights_.end()) {
      // Released only once the validation set for that height is out.
      if (published_.validation(it->second) != nullptr) bytes = own_models_.at(it->second)->bytes;
    } else if (auto c = copied_.find(req.model_hash); c != copied_.end()) {
      if (const auto* m = models_.get(req.model_hash, c->second)) bytes = m->bytes;
    }
  }
  if (bytes) {
    out.messages.push_back(
        {Outbound::Mode::unicast, net::FetchResponse{req.model_hash, cfg_.id, req.requester, bytes}, req.requester, {}});
  } else {
    out.messages.push_back(
        {Outbound::Mode::unicast, net::FetchDeferred{req.model_hash, cfg_.id, req.requester}, req.requester, {}});
  }
}

void Miner::request(const std::vector<Need>& needs, Round now, StepOutput& out) {
  for (const auto& n : needs) {
    if (n.kind != Need::Kind::model || n.owner == cfg_.id) continue;
    auto& st = fetches_[{n.digest, n.owner}];
    if (st.in_flight || now < st.retry_at) continue;
    st.in_flight = true;
    out.messages.push_back(
        {Outbound::Mode::unicast, net::FetchRequest{n.digest, n.owner, cfg_.id}, n.owner, {}});
  }
}

void Miner::process_pending_keyblocks(Round now, StepOutput& out) {
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<KeyBlock> still;
    std::vector<KeyBlock> released;
    for (auto& kb : pending_keyblocks_) {
      auto v = verifier_.keyblock(kb);
      if (v.is_valid()) {
        const auto d = kb.digest();
        store_.add_keyblock(kb);
        emit(out, make_event(MinerEvent::Kind::keyblock_adopted, now, kb.height, d));
        for (auto& child : store_.take_orphans(d)) released.push_back(std::move(child));
        progress = true;
      } else if (v.is_invalid()) {
        ++rejected_;
        emit(out, make_event(MinerEvent::Kind::rejected, now, kb.height, kb.digest(), v.reason));
        progress = true;
      } else {
        request(v.needs, now, out);
        still.push_back(std::move(kb));
      }
    }
    for (auto& kb : released) still.push_back(std::move(kb));
    pending_keyblocks_ = std::move(still);
  }
  refresh_tip(now, out);
}

void Miner::refresh_tip(Round now, StepOutput& out) {
  if (store_.best_tip() == tip_) return;
  tip_ = store_.best_tip();
  tip_round_ = now;
  pow_.reset();
  pow_key_.clear();
  emit(out, make_event(MinerEvent::Kind::tip_changed, now, store_.keyblock(tip_)->height, tip_));
}

std::optional<HashDigest> Miner::context_parent() const {
  return params_.cfs ? std::nullopt : std::optional<HashDigest>(tip_);
}

void Miner::act(Round now, StepOutput& out) {
  const Height h = store_.keyblock(tip_)->height + 1;
  if (board_.for_height(h) == nullptr || board_.incoming_at(h) == nullptr) return;
  const Phase ph = phase();
  if (ph == Phase::training) {
    issue_miniblock(now, h, out);
    return;
  }
  maybe_generate_ensemble(now, h, ph == Phase::mining, out);
  if (ph == Phase::mining) mine(now, h, out);
}

void Miner::issue_miniblock(Round now, Height h, StepOutput& out) {
  if (miniblock_tips_.count(tip_)) return;
  const TaskEntry* entry = board_.for_height(h);
  MiniBlock mb;
  mb.timestamp = now;
  mb.task_id = entry->id;
  mb.miner_id = cfg_.id;
  mb.prehash = tip_;
  mb.height = h;
  std::shared_ptr<const ml::TrainedModel> model;
  if (cfg_.strategy == Strategy::plagiarist) {
    const MiniBlock* victim = nullptr;
    for (const auto& d : store_.miniblocks_at(h)) {
      const MiniBlock* o = store_.miniblock(d);
      if (o->miner_id != cfg_.id && o->prehash == tip_ && o->task_id == entry->id) {
        victim = o;
        break;
      }
    }
    if (victim == nullptr) return;  // nothing to copy yet
    mb.model_hash = victim->model_hash;
    copied_[victim->model_hash] = victim->miner_id;
  } else {
    model = own_model(h);
    mb.model_hash = model->model_hash;
  }
  const auto d = mb.digest();
  seen_.insert(d);
  store_.add_miniblock(mb);
  miniblock_tips_.insert(tip_);
  out.messages.push_back({Outbound::Mode::broadcast, mb, 0, {}});
  MinerEvent ev = make_event(MinerEvent::Kind::miniblock_generated, now, h, d);
  ev.model = model;
  ev.miniblock = mb;
  emit(out, std::move(ev));
}

void Miner::maybe_generate_ensemble(Round now, Height h, bool deadline, StepOutput& out) {
  const auto parent = context_parent();
  const auto context = std::make_pair(h, parent.value_or(HashDigest::zero()));
  if (ensemble_done_.count(context)) return;
  const TaskEntry* entry = board_.for_height(h);

  std::vector<const MiniBlock*> valid;
  bool unresolved = false;
  for (const auto& d : store_.miniblocks_at(h)) {
    const MiniBlock* mb = store_.miniblock(d);
    if (mb->task_id != entry->id) continue;
    if (parent && mb->prehash != *parent) continue;
    auto v = verifier_.miniblock(*mb);
    if (v.is_pending()) {
      unresolved = true;
      request(v.needs, now, out);
    } else if (v.is_valid()) {
      valid.push_back(mb);
    }
  }
  if (unresolved && !deadline) return;
  ensemble_done_.insert(context);

  // One MiniBlock per distinct parameter set: prefer the one on our own tip,
  // then the smaller digest.
  std::map<HashDigest, std::pair<bool, HashDigest>> chosen;  // omega -> (off tip, digest)
  for (const auto* mb : valid) {
    const auto omega = verifier_.model_of(*mb)->omega_hash;
    auto rank = std::make_pair(mb->prehash != tip_, mb->digest());
    auto it = chosen.find(omega);
    if (it == chosen.end() || rank < it->second) chosen[omega] = rank;
  }
  if (chosen.empty()) return;  // abstain

  EnsembleBlock eb;
  for (const auto& [omega, rank] : chosen) eb.miniblock_hashes.push_back(rank.second);
  std::sort(eb.miniblock_hashes.begin(), eb.miniblock_hashes.end());
  eb.miner_id = cfg_.id;
  eb.task_id = entry->id;
  eb.timestamp = now;
  eb.height = h;
  auto metric = verifier_.validation_metric(eb);
  if (!metric) return;
  eb.metric_v = *metric;
  if (cfg_.strategy == Strategy::metric_inflater && eb.metric_v.num < eb.metric_v.den) ++eb.metric_v.num;

  const auto d = eb.digest();
  seen_.insert(d);
  store_.add_ensembleblock(eb);
  own_ensembles_.insert(d);
  out.messages.push_back({Outbound::Mode::broadcast, eb, 0, {}});
  MinerEvent ev = make_event(MinerEvent::Kind::ensemble_generated, now, h, d);
  ev.ensemble = eb;
  emit(out, std::move(ev));
  dirty_ = true;
}

void Miner::mine(Round now, Height h, StepOutput& out) {
  const TaskEntry* entry = board_.for_height(h);
  if (!pow_ || dirty_) {
    const auto rule = context_parent();
    std::vector<RankedEnsemble> entries;
    for (const auto& d : store_.ensembleblocks_at(h)) {
      const EnsembleBlock* eb = store_.ensembleblock(d);
      if (eb->task_id != entry->id) continue;
      const bool trusted = cfg_.strategy == Strategy::metric_inflater && own_ensembles_.count(d);
      if (!trusted) {
        auto v = verifier_.ensemble(*eb, rule);
        if (v.is_pending()) request(v.needs, now, out);
        if (!v.is_valid()) continue;
      }
      if (auto m = verifier_.test_metric(*eb)) entries.push_back({d, *m});
    }
    rank_entries(entries);

    HashDigest parent = tip_;
    std::vector<MinerId> producers;
    if (!entries.empty()) {
      const EnsembleBlock* winner = store_.ensembleblock(entries.front().ensemble);
      std::vector<HashDigest> votes;
      for (const auto& m : winner->miniblock_hashes) {
        const MiniBlock* mb = store_.miniblock(m);
        producers.push_back(mb->miner_id);
        votes.push_back(mb->prehash);
      }
      if (params_.cfs) parent = plurality_parent(votes);
    }
    const KeyBlock* parent_kb = store_.keyblock(parent);
    if (parent_kb == nullptr || parent_kb->height + 1 != h) {
      pow_.reset();
      pow_key_.clear();
      return;  // the voted parent has not reached us yet
    }

    std::vector<HashDigest> key{parent};
    for (const auto& e : entries) key.push_back(e.ensemble);
    if (!pow_ || key != pow_key_) {
      auto payload = allocate_rewards(producers, entry->task.fee, cfg_.id, params_.keyblock_reward);
      pow_.emplace(assemble_keyblock(*parent_kb, parent, entry->id, board_.incoming_at(h)->id, std::move(entries),
                                     std::move(payload), cfg_.id, now));
      pow_key_ = std::move(key);
    }
  }

  if (!pow_->attempt(now, params_.hash_trials, params_.target, next_nonce_)) return;
  KeyBlock kb = pow_->block();
  pow_.reset();
  pow_key_.clear();
  const auto d = kb.digest();
  seen_.insert(d);
  store_.add_keyblock(kb);
  out.messages.push_back({Outbound::Mode::broadcast, kb, 0, {}});
  MinerEvent ev = make_event(MinerEvent::Kind::keyblock_generated, now, kb.height, d);
  ev.keyblock = kb;
  emit(out, std::move(ev));
  for (auto& child : store_.take_orphans(d)) pending_keyblocks_.push_back(std::move(child));
  refresh_tip(now, out);
}

Strategy parse_strategy(std::string_view name) {
  if (name == "honest") return Strategy::honest;
  if (name == "plagiarist") return Strategy::plagiarist;
  if (name == "metric_inflater") return Strategy::metric_inflater;
  if (name == "withholder") return Strategy::withholder;
  throw std::invalid_argument("unknown miner strategy: " + std::string(name));
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::honest: return "honest";
    case Strategy::plagiarist: return "plagiarist";
    case Strategy::metric_inflater: return "metric_inflater";
    case Strategy::withholder: return "withholder";
  }
  return "unknown";
}

}  // namespace bagchain::consensus
