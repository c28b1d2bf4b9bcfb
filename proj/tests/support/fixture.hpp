// SPDX-License-Identifier: Apache-2.0
// Hand-built consensus worlds: a task board, one miner's view (store, model
// cache, received datasets) and helpers that produce honest blocks on it.
#pragma once

#include <memory>
#include <vector>

#include "bagchain/chain/block_store.hpp"
#include "bagchain/consensus/model_cache.hpp"
#include "bagchain/consensus/params.hpp"
#include "bagchain/consensus/task_board.hpp"
#include "bagchain/consensus/verifier.hpp"
#include "bagchain/ml/model.hpp"

namespace bagchain::testing {

struct FixtureConfig {
  std::uint64_t seed = 7;
  std::size_t samples = 600;
  std::size_t features = 4;
  std::uint32_t classes = 3;
  double separation = 2.0;
  std::size_t heights = 6;
  std::size_t queue_length = 2;
  Fraction metric_min{0, 1};
  std::uint64_t fee = 100;
  bool cfs = false;
  unsigned target_exponent = 255;  // half of all digests pass
};

std::shared_ptr<const consensus::TaskBoard> make_board(const FixtureConfig& cfg);

class Fixture {
 public:
  explicit Fixture(FixtureConfig cfg = {});
  Fixture(const Fixture&) = delete;
  Fixture& operator=(const Fixture&) = delete;

  const FixtureConfig cfg;
  std::shared_ptr<const consensus::TaskBoard> board;
  consensus::ConsensusParams params;
  BlockStore store;
  consensus::ModelCache models;
  consensus::PublishedData published;
  consensus::Verifier verifier;

  [[nodiscard]] const consensus::TaskEntry& task(Height h) const { return *board->for_height(h); }

  /// D_V at round t_v and D_E at t_e for height h.
  void publish(Height h, Round t_v = 100, Round t_e = 110);

  /// Bootstrap-trained model for `owner`; `variant` picks the resample.
  ml::TrainedModel train_model(MinerId owner, std::uint64_t variant, std::uint32_t max_depth = 4) const;

  /// MiniBlock for `model` on `parent`, stored along with the model bytes.
  MiniBlock add_miniblock(const ml::TrainedModel& model, const HashDigest& parent, Round ts = 1);
  /// Honest EnsembleBlock over `mbs` with metric_v recomputed, stored.
  EnsembleBlock add_ensemble(const std::vector<MiniBlock>& mbs, MinerId miner, Round ts = 105);
  /// Honest KeyBlock ranking `ebs` on D_E; nonce ground until the PoW passes. Not stored.
  KeyBlock make_keyblock(const HashDigest& parent, const std::vector<EnsembleBlock>& ebs, MinerId miner,
                         Round ts = 120);
  /// Re-grinds the nonce after a mutation so the PoW gate passes again.
  void regrind(KeyBlock& kb) const;
  /// Grinds until the digest fails the target.
  void break_pow(KeyBlock& kb) const;
};

}  // namespace bagchain::testing
