// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bagchain/chain/fraction.hpp"
#include "bagchain/chain/types.hpp"
#include "bagchain/consensus/task_board.hpp"
#include "bagchain/harness/scenario.hpp"
#include "bagchain/ml/dataset.hpp"
#include "bagchain/ml/model.hpp"
#include "bagchain/net/topology.hpp"

namespace bagchain::harness {

/// Datasets, task pool and topology derived from a scenario and its seed.
struct World {
  std::shared_ptr<const ml::Dataset> full_train;  // before the public/private split
  std::shared_ptr<const ml::Dataset> held_out;    // halved into D_V / D_E per task
  std::shared_ptr<const ml::Dataset> public_train;
  std::vector<ml::Dataset> private_data;  // one per miner
  std::shared_ptr<const consensus::TaskBoard> board;
};

World build_world(const Scenario& sc);
net::Topology build_topology(const Scenario& sc);

struct HeightRecord {
  Height height = 0;
  Fraction accuracy;       // winning EnsembleBlock on D_E, 0 for an empty KeyBlock
  Fraction best_possible;  // every valid base model for the height's task on D_E
  std::size_t miniblocks_total = 0;
  std::size_t miniblocks_used = 0;
  std::size_t forks = 0;  // KeyBlocks at this height beyond the first
  Round rounds = 0;       // timestamp gap to the previous main-chain KeyBlock
  std::vector<std::pair<MinerId, Fraction>> base_accuracy;
  Fraction dummy_accuracy;  // one tree trained on D_T only
  HashDigest keyblock;
  MinerId keyblock_miner = 0;
  bool empty_keyblock = false;

  [[nodiscard]] std::size_t wastage() const { return miniblocks_total - miniblocks_used; }
};

struct RewardLine {
  MinerId miner = 0;
  std::uint64_t fee_shares = 0;
  std::uint64_t keyblock_rewards = 0;
};

struct RunResult {
  Scenario scenario;
  std::vector<HeightRecord> records;
  std::vector<RewardLine> rewards;
  Round rounds = 0;
  bool timed_out = false;
  std::size_t keyblocks_generated = 0;
  std::size_t messages_delivered = 0;
  std::size_t rejected = 0;
  std::uint64_t fees_paid = 0;  // fee shares on the main chain
  std::uint64_t fees_due = 0;   // fees of main-chain tasks completed with a winning EnsembleBlock

  [[nodiscard]] bool fee_conserved() const { return fees_paid == fees_due; }
};

/// Runs until the main chain reaches `heights` or the round budget runs out
/// (timed_out, with the records completed so far).
RunResult run(const Scenario& sc);

/// Majority vote over models with distinct parameters, scored on `data`.
Fraction best_possible_accuracy(std::span<const ml::TrainedModel* const> models, const ml::Dataset& data);

}  // namespace bagchain::harness
