// SPDX-License-Identifier: Apache-2.0
#include "bagchain/harness/simulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "bagchain/chain/block_store.hpp"
#include "bagchain/chain/seed.hpp"
#include "bagchain/consensus/miner.hpp"
#include "bagchain/ml/bagging.hpp"
#include "bagchain/ml/synth.hpp"
#include "bagchain/net/network.hpp"

namespace bagchain::harness {

using consensus::Miner;
using consensus::MinerEvent;
using consensus::TaskBoard;
using consensus::TaskEntry;

namespace {

std::pair<ml::Dataset, ml::Dataset> holdout(const ml::Dataset& data, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(data.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t n_test = ml::share_count(fraction, data.rows());
  std::span<const std::size_t> all(idx);
  return {ml::subset(data, all.subspan(n_test), ml::DatasetRole::full_train),
          ml::subset(data, all.first(n_test), ml::DatasetRole::held_out)};
}

}  // namespace

World build_world(const Scenario& sc) {
  sc.validate();
  const auto master = sc.seed;
  ml::Dataset train, test;
  if (sc.source == DataSource::synthetic) {
    auto all = ml::synthesize_dataset(
        {sc.samples, sc.features, sc.classes, sc.separation, derive_seed(master, "dataset")});
    std::tie(train, test) = holdout(all, sc.holdout_fraction, derive_seed(master, "holdout"));
  } else if (sc.csv_test.empty()) {
    auto all = ml::load_csv(sc.csv_train);
    std::tie(train, test) = holdout(all, sc.holdout_fraction, derive_seed(master, "holdout"));
  } else {
    train = ml::load_csv(sc.csv_train);
    test = ml::load_csv(sc.csv_test, train.num_classes(), ml::DatasetRole::held_out);
  }

  World w;
  w.full_train = std::make_shared<const ml::Dataset>(train);
  w.held_out = std::make_shared<const ml::Dataset>(test);

  auto plan = sc.split;
  plan.seed = derive_seed(master, "split");
  ml::DataSplit split;
  if (plan.heterogeneity == ml::Heterogeneity::iid) {
    split = ml::split_iid(train, plan);
    if (split.private_parts.empty() || split.private_parts.front().empty())
      w.private_data.assign(sc.miners, ml::Dataset(train.cols(), train.num_classes(), ml::DatasetRole::private_train));
    else
      w.private_data = ml::assign_private_parts(split.private_parts, sc.miners, derive_seed(master, "assign"));
  } else {
    split = ml::split_dirichlet(train, plan, sc.miners);
    w.private_data = split.private_parts;
  }
  w.public_train = std::make_shared<const ml::Dataset>(split.public_train);

  const auto train_commit = ml::commitment(*w.public_train);
  std::vector<TaskEntry> pool;
  const std::size_t pool_size = sc.heights + sc.queue_length + 8;
  for (std::size_t k = 0; k < pool_size; ++k) {
    auto halves = ml::split_validation_test(test, derive_seed(master, "task", {k}));
    TaskEntry e;
    e.validation = std::make_shared<const ml::Dataset>(std::move(halves.validation));
    e.test = std::make_shared<const ml::Dataset>(std::move(halves.test));
    e.task.train_commit = train_commit;
    e.task.val_commit = ml::commitment(*e.validation);
    e.task.test_commit = ml::commitment(*e.test);
    e.task.learner_spec = sc.learner;
    e.task.metric_min = sc.metric_min;
    e.task.fee = sc.fee;
    e.task.requester_id = sc.miners;
    e.id = e.task.id();
    pool.push_back(std::move(e));
  }
  w.board = std::make_shared<const TaskBoard>(w.public_train, std::move(pool), sc.queue_length);
  return w;
}

net::Topology build_topology(const Scenario& sc) {
  switch (sc.topology) {
    case TopologyKind::full: return net::Topology::fully_connected(sc.miners, sc.bandwidth);
    case TopologyKind::mesh:
      return net::Topology::erdos_renyi(sc.miners, sc.edge_probability, sc.bandwidth, derive_seed(sc.seed, "topology"));
    case TopologyKind::file: return net::Topology::from_file(sc.topology_file, sc.miners);
  }
  throw ScenarioError("unknown topology kind");
}

Fraction best_possible_accuracy(std::span<const ml::TrainedModel* const> models, const ml::Dataset& data) {
  std::set<HashDigest> seen;
  std::vector<std::vector<ml::Label>> ballots;
  for (const auto* m : models)
    if (seen.insert(m->omega_hash).second) ballots.push_back(ml::predict(m->tree, data));
  if (ballots.empty()) return Fraction{0, 1};
  return ml::metric(ml::aggregate(ballots, data.num_classes()), data.labels());
}

namespace {

struct Generated {
  MiniBlock mb;
  std::shared_ptr<const ml::TrainedModel> model;
};

class Driver {
 public:
  explicit Driver(const Scenario& sc)
      : sc_(sc),
        world_(build_world(sc)),
        network_(build_topology(sc), net_config(sc)),
        global_(world_.board->genesis()) {
    if (network_.topology().size() != sc.miners) throw ScenarioError("topology size differs from the miner count");
    params_.target = target_from_exponent(sc.target_exponent);
    params_.hash_trials = sc.hash_trials;
    params_.cfs = sc.cfs;
    params_.keyblock_reward = sc.keyblock_reward;
    params_.exec = kernels::Exec::serial;
    for (std::uint32_t i = 0; i < sc.miners; ++i) {
      consensus::MinerConfig cfg{i, sc.strategy_of(i), sc.seed, network_.gossip()};
      miners_.push_back(std::make_unique<Miner>(cfg, params_, *world_.board, world_.private_data[i]));
    }
    first_keyblock_round_[0] = 0;
    schedule_publications(1, 0);
  }

  RunResult run() {
    RunResult res;
    res.scenario = sc_;
    const auto budget = sc_.effective_round_budget();
    const auto n = miners_.size();
    std::vector<std::vector<net::Message>> inbox(n);
    std::vector<consensus::StepOutput> outputs(n);
    Round r = 0;
    while (global_.keyblock(global_.best_tip())->height < sc_.heights) {
      ++r;
      if (r > budget) {
        res.timed_out = true;
        r = budget;
        break;
      }
      for (auto& box : inbox) box.clear();
      for (auto& m : network_.step(r)) inbox[m.dst].push_back(std::move(m));

      if (sc_.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < n; ++i) outputs[i] = miners_[i]->step(r, inbox[i]);
      } else {
        for (std::size_t i = 0; i < n; ++i) outputs[i] = miners_[i]->step(r, inbox[i]);
      }

      for (std::size_t i = 0; i < n; ++i) {
        const auto src = static_cast<net::NodeId>(i);
        for (auto& msg : outputs[i].messages) {
          if (msg.mode == consensus::Outbound::Mode::broadcast)
            network_.broadcast(src, msg.payload, r, msg.skip);
          else
            network_.unicast(src, msg.dst, msg.payload, r);
        }
        for (auto& ev : outputs[i].events) record(ev);
      }
      publish(r);
    }
    res.rounds = r;
    res.messages_delivered = network_.delivered();
    for (const auto& m : miners_) res.rejected += m->rejected();
    res.keyblocks_generated = keyblocks_generated_;
    summarise(res);
    return res;
  }

 private:
  static net::NetConfig net_config(const Scenario& sc) {
    net::NetConfig c;
    c.miniblock_size = sc.miniblock_size;
    c.ensembleblock_size = sc.ensembleblock_size;
    c.keyblock_size = sc.keyblock_size;
    c.model_size = sc.model_size;
    c.dataset_unit_cost = sc.dataset_unit_cost;
    c.direct_bandwidth = sc.bandwidth;
    c.keyblock_link_delay = sc.keyblock_delay;
    return c;
  }

  bool honest(MinerId id) const { return sc_.strategy_of(id) == consensus::Strategy::honest; }

  void record(const MinerEvent& ev) {
    switch (ev.kind) {
      case MinerEvent::Kind::miniblock_generated:
        miniblocks_[ev.height].push_back({*ev.miniblock, ev.model});
        break;
      case MinerEvent::Kind::keyblock_generated:
        ++keyblocks_generated_;
        if (honest(ev.miner)) admit(*ev.keyblock, ev.round);
        break;
      case MinerEvent::Kind::keyblock_adopted:
        if (honest(ev.miner) && !global_.has_keyblock(ev.digest)) {
          if (const KeyBlock* kb = miners_[ev.miner]->store().keyblock(ev.digest)) admit(*kb, ev.round);
        }
        break;
      default:
        break;
    }
  }

  // The reference chain holds every KeyBlock an honest miner produced or accepted.
  void admit(const KeyBlock& kb, Round now) {
    if (global_.has_keyblock(kb.digest()) || !global_.has_keyblock(kb.prehash)) return;
    global_.add_keyblock(kb);
    if (!first_keyblock_round_.count(kb.height)) {
      first_keyblock_round_[kb.height] = now;
      schedule_publications(kb.height + 1, now);
    }
  }

  void schedule_publications(Height h, Round anchor) {
    if (world_.board->for_height(h) == nullptr) return;
    const Round t1 = anchor + sc_.phase1_rounds;
    publications_[t1].push_back({h, net::DatasetKind::validation});
    publications_[t1 + sc_.phase2_rounds].push_back({h, net::DatasetKind::test});
    publication_round_[{h, net::DatasetKind::validation}] = t1;
  }

  void publish(Round now) {
    auto it = publications_.find(now);
    if (it == publications_.end()) return;
    for (const auto& [h, kind] : it->second) {
      const TaskEntry* entry = world_.board->for_height(h);
      net::DatasetPublication pub;
      pub.height = h;
      pub.kind = kind;
      pub.timestamp = now;
      pub.task_id = entry->id;
      pub.requester_id = sc_.miners;
      pub.data = kind == net::DatasetKind::validation ? entry->validation : entry->test;
      for (std::uint32_t i = 0; i < sc_.miners; ++i) network_.deliver_direct(sc_.miners, i, pub, now);
    }
    publications_.erase(it);
  }

  // Valid base models for a height, one entry per distinct model hash.
  std::vector<const ml::TrainedModel*> valid_models(Height h, const TaskEntry& entry) {
    std::vector<const ml::TrainedModel*> out;
    auto t1 = publication_round_.find({h, net::DatasetKind::validation});
    auto it = miniblocks_.find(h);
    if (it == miniblocks_.end() || t1 == publication_round_.end()) return out;
    std::set<HashDigest> seen;
    for (const auto& g : it->second) {
      if (!g.model || g.mb.task_id != entry.id || g.mb.timestamp >= t1->second) continue;
      if (g.model->model_hash != g.mb.model_hash) continue;
      if (!seen.insert(g.mb.model_hash).second) continue;
      auto acc = ml::metric(ml::predict(g.model->tree, *entry.validation), entry.validation->labels());
      if (acc > entry.task.metric_min) out.push_back(g.model.get());
    }
    return out;
  }

  void summarise(RunResult& res) {
    const auto chain = global_.main_chain();
    const auto dummy = ml::train(*world_.public_train, sc_.learner);
    std::map<MinerId, RewardLine> ledger;
    for (std::uint32_t i = 0; i < sc_.miners; ++i) ledger[i] = {i, 0, 0};

    for (std::size_t idx = 1; idx < chain.size() && idx <= sc_.heights; ++idx) {
      const KeyBlock& kb = *global_.keyblock(chain[idx]);
      const KeyBlock& prev = *global_.keyblock(chain[idx - 1]);
      const TaskEntry& entry = *world_.board->for_height(kb.height);
      const auto& test = *entry.test;

      HeightRecord rec;
      rec.height = kb.height;
      rec.keyblock = chain[idx];
      rec.keyblock_miner = kb.miner_id;
      rec.rounds = kb.timestamp - prev.timestamp;
      rec.forks = global_.keyblocks_at(kb.height).size() - 1;
      rec.empty_keyblock = kb.eb_entries.empty();
      if (!rec.empty_keyblock) {
        rec.accuracy = kb.eb_entries.front().metric_e;
        rec.miniblocks_used = winning_reference_count(kb);
        res.fees_due += entry.task.fee;
      } else {
        rec.accuracy = Fraction{0, 1};
      }
      auto models = valid_models(kb.height, entry);
      rec.miniblocks_total = models.size();
      rec.best_possible = best_possible_accuracy(models, test);
      if (auto it = miniblocks_.find(kb.height); it != miniblocks_.end()) {
        std::set<MinerId> done;
        for (const auto& g : it->second)
          if (g.model && done.insert(g.mb.miner_id).second)
            rec.base_accuracy.push_back({g.mb.miner_id, ml::metric(ml::predict(g.model->tree, test), test.labels())});
        std::sort(rec.base_accuracy.begin(), rec.base_accuracy.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
      }
      rec.dummy_accuracy = ml::metric(ml::predict(dummy, test), test.labels());

      for (const auto& p : kb.payload) {
        auto& line = ledger[p.payee];
        if (p.kind == PayloadKind::training_fee_share) {
          line.fee_shares += p.amount;
          res.fees_paid += p.amount;
        } else {
          line.keyblock_rewards += p.amount;
        }
      }
      res.records.push_back(std::move(rec));
    }
    for (const auto& [id, line] : ledger) res.rewards.push_back(line);
  }

  // The winning EnsembleBlock's reference count. Any honest miner that
  // accepted the KeyBlock holds it.
  std::size_t winning_reference_count(const KeyBlock& kb) const {
    const auto& winner = kb.eb_entries.front().ensemble;
    for (const auto& m : miners_)
      if (const EnsembleBlock* eb = m->store().ensembleblock(winner)) return eb->miniblock_hashes.size();
    return 0;
  }

  const Scenario& sc_;
  World world_;
  net::Network network_;
  consensus::ConsensusParams params_;
  std::vector<std::unique_ptr<Miner>> miners_;
  BlockStore global_;
  std::map<Height, Round> first_keyblock_round_;
  std::map<Round, std::vector<std::pair<Height, net::DatasetKind>>> publications_;
  std::map<std::pair<Height, net::DatasetKind>, Round> publication_round_;
  std::map<Height, std::vector<Generated>> miniblocks_;
  std::size_t keyblocks_generated_ = 0;
};

}  // namespace

RunResult run(const Scenario& sc) { return Driver(sc).run(); }

}  // namespace bagchain::harness
