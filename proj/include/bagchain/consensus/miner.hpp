// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "bagchain/chain/block_store.hpp"
#include "bagchain/consensus/model_cache.hpp"
#include "bagchain/consensus/params.hpp"
#include "bagchain/consensus/rules.hpp"
#include "bagchain/consensus/task_board.hpp"
#include "bagchain/consensus/verifier.hpp"
#include "bagchain/ml/model.hpp"
#include "bagchain/net/message.hpp"

namespace bagchain::consensus {

struct Outbound {
  enum class Mode : std::uint8_t { broadcast, unicast } mode = Mode::broadcast;
  net::Payload payload;
  net::NodeId dst = 0;               // unicast target
  std::optional<net::NodeId> skip;   // relays do not echo back to the sender
};

struct MinerEvent {
  enum class Kind : std::uint8_t {
    miniblock_generated,
    ensemble_generated,
    keyblock_generated,
    keyblock_adopted,
    tip_changed,
    rejected,  // failed validation
    dropped,   // malformed or failed the PoW gate on arrival
  };
  Kind kind = Kind::rejected;
  MinerId miner = 0;
  Round round = 0;
  Height height = 0;
  HashDigest digest;
  Reason reason = Reason::ok;
  std::shared_ptr<const ml::TrainedModel> model;  // set for miniblock_generated by honest miners
  std::optional<MiniBlock> miniblock;
  std::optional<EnsembleBlock> ensemble;
  std::optional<KeyBlock> keyblock;
};

struct StepOutput {
  std::vector<Outbound> messages;
  std::vector<MinerEvent> events;
};

struct MinerConfig {
  MinerId id = 0;
  Strategy strategy = Strategy::honest;
  std::uint64_t seed = 0;  // bootstrap seeds derive from (seed, id, height)
  bool relay = false;      // re-broadcast received blocks (mesh gossip)
};

enum class Phase : std::uint8_t { training = 1, ensembling = 2, mining = 3 };

/// One miner's protocol state. step() is a pure function of the current
/// state and the inbox, so miners can be stepped concurrently as long as the
/// outputs are merged in miner-ID order.
class Miner {
 public:
  Miner(MinerConfig config, const ConsensusParams& params, const TaskBoard& board, const ml::Dataset& private_data);
  Miner(const Miner&) = delete;
  Miner& operator=(const Miner&) = delete;

  StepOutput step(Round now, std::span<const net::Message> inbox);

  [[nodiscard]] MinerId id() const { return cfg_.id; }
  [[nodiscard]] Strategy strategy() const { return cfg_.strategy; }
  [[nodiscard]] const BlockStore& store() const { return store_; }
  [[nodiscard]] const HashDigest& tip() const { return tip_; }
  [[nodiscard]] Phase phase() const;
  /// Round at which the current phase began at this miner.
  [[nodiscard]] Round phase_anchor() const;
  [[nodiscard]] const ml::Dataset& local_train() const { return local_train_; }
  [[nodiscard]] ModelCache& models() { return models_; }
  [[nodiscard]] Verifier& verifier() { return verifier_; }
  [[nodiscard]] std::size_t dropped() const { return dropped_; }
  [[nodiscard]] std::size_t rejected() const { return rejected_; }

  /// The base model this miner trains for height h: Train(Resample(D_T u D_M)).
  /// Deterministic in (seed, id, h), independent of the tip.
  std::shared_ptr<const ml::TrainedModel> own_model(Height h);

 private:
  void receive(Round now, const net::Message& msg, StepOutput& out);
  void on_miniblock(Round now, const MiniBlock& mb, net::NodeId src, StepOutput& out);
  void on_ensemble(Round now, const EnsembleBlock& eb, net::NodeId src, StepOutput& out);
  void on_keyblock(Round now, const KeyBlock& kb, net::NodeId src, StepOutput& out);
  void on_publication(Round now, const net::DatasetPublication& pub, StepOutput& out);
  void on_fetch_request(const net::FetchRequest& req, StepOutput& out);

  void process_pending_keyblocks(Round now, StepOutput& out);
  void refresh_tip(Round now, StepOutput& out);
  void act(Round now, StepOutput& out);
  void issue_miniblock(Round now, Height h, StepOutput& out);
  void maybe_generate_ensemble(Round now, Height h, bool deadline, StepOutput& out);
  void mine(Round now, Height h, StepOutput& out);
  void request(const std::vector<Need>& needs, Round now, StepOutput& out);
  void relay(const net::Payload& p, net::NodeId src, StepOutput& out);
  void emit(StepOutput& out, MinerEvent ev) const;

  [[nodiscard]] std::optional<HashDigest> context_parent() const;

  MinerConfig cfg_;
  const ConsensusParams& params_;
  const TaskBoard& board_;
  ml::Dataset local_train_;

  BlockStore store_;
  ModelCache models_;
  PublishedData published_;
  Verifier verifier_;
  HashDigest tip_;
  Round tip_round_ = 0;
  std::map<Height, Round> dv_received_;
  std::map<Height, Round> de_received_;

  std::map<Height, std::shared_ptr<const ml::TrainedModel>> own_models_;
  std::map<HashDigest, Height> own_model_heights_;
  std::set<HashDigest> seen_;
  std::vector<KeyBlock> pending_keyblocks_;

  struct FetchState {
    bool in_flight = false;
    Round retry_at = 0;
  };
  std::map<std::pair<HashDigest, MinerId>, FetchState> fetches_;

  std::set<HashDigest> miniblock_tips_;                  // tips already given a MiniBlock
  std::set<std::pair<Height, HashDigest>> ensemble_done_;  // (height, context parent)
  std::set<HashDigest> own_ensembles_;
  std::map<HashDigest, MinerId> copied_;  // plagiarist: claimed hash -> victim

  std::optional<PowSearch> pow_;
  std::vector<HashDigest> pow_key_;
  std::uint64_t next_nonce_ = 0;
  bool dirty_ = true;

  std::size_t dropped_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace bagchain::consensus
