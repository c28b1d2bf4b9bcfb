// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bagchain/chain/encoding.hpp"
#include "bagchain/chain/fraction.hpp"
#include "bagchain/chain/hash.hpp"
#include "bagchain/ml/tree.hpp"

namespace bagchain {

using MinerId = std::uint32_t;
using ActorId = std::uint32_t;
using Round = std::uint64_t;
using Height = std::uint64_t;

/// Thrown when a structural protocol rule is broken (e.g. task queue misuse).
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class LearnerFamily : std::uint8_t { cart_tree = 1 };
enum class AggregateRule : std::uint8_t { majority_vote = 1 };
enum class MetricRule : std::uint8_t { accuracy = 1 };

struct Task {
  HashDigest train_commit;
  HashDigest val_commit;
  HashDigest test_commit;
  LearnerFamily learner = LearnerFamily::cart_tree;
  ml::LearnerSpec learner_spec;
  AggregateRule aggregate_rule = AggregateRule::majority_vote;
  MetricRule metric_rule = MetricRule::accuracy;
  Fraction metric_min{0, 1};
  std::uint64_t fee = 0;
  ActorId requester_id = 0;

  /// Throws ProtocolViolation on metric_min outside [0,1] or repeated commitments.
  void validate() const;
  [[nodiscard]] std::vector<std::uint8_t> encode() const;
  [[nodiscard]] HashDigest id() const;
};

struct MiniBlock {
  Round timestamp = 0;
  HashDigest task_id;
  HashDigest model_hash;
  MinerId miner_id = 0;
  HashDigest prehash;
  Height height = 0;

  [[nodiscard]] std::vector<std::uint8_t> encode() const;
  [[nodiscard]] HashDigest digest() const;
  static MiniBlock decode(std::span<const std::uint8_t> bytes);
  bool operator==(const MiniBlock&) const = default;
};

struct EnsembleBlock {
  std::vector<HashDigest> miniblock_hashes;
  Fraction metric_v;
  MinerId miner_id = 0;
  HashDigest task_id;
  Round timestamp = 0;
  Height height = 0;

  /// Non-empty, duplicate-free references and metric_v in [0,1].
  [[nodiscard]] bool well_formed() const;
  [[nodiscard]] std::vector<std::uint8_t> encode() const;
  [[nodiscard]] HashDigest digest() const;
  static EnsembleBlock decode(std::span<const std::uint8_t> bytes);
  bool operator==(const EnsembleBlock&) const = default;
};

enum class PayloadKind : std::uint8_t { training_fee_share = 1, keyblock_reward = 2 };

struct PayloadRecord {
  PayloadKind kind = PayloadKind::training_fee_share;
  MinerId payee = 0;
  std::uint64_t amount = 0;

  [[nodiscard]] std::vector<std::uint8_t> encode() const;
  bool operator==(const PayloadRecord&) const = default;
};

struct RankedEnsemble {
  HashDigest ensemble;
  Fraction metric_e;
  bool operator==(const RankedEnsemble&) const = default;
};

/// The PoW-mined block. The header (everything except `payload`) is what is
/// hashed; payload records are committed through `merkle_root`.
struct KeyBlock {
  std::uint64_t nonce = 0;
  HashDigest merkle_root;
  Round timestamp = 0;
  Fraction metric_best{0, 1};
  std::vector<RankedEnsemble> eb_entries;  // non-increasing metric_e
  MinerId miner_id = 0;
  HashDigest task_id;
  std::vector<HashDigest> task_queue;
  HashDigest prehash;
  Height height = 0;
  std::vector<PayloadRecord> payload;

  [[nodiscard]] std::vector<std::uint8_t> encode_header() const;
  [[nodiscard]] HashDigest digest() const;
  /// Header followed by the length-prefixed payload records.
  [[nodiscard]] std::vector<std::uint8_t> encode() const;
  static KeyBlock decode(std::span<const std::uint8_t> bytes);
  bool operator==(const KeyBlock&) const = default;

  /// Byte offsets of the nonce and timestamp inside encode_header(), so
  /// miners can patch them between hash trials.
  static constexpr std::size_t kNonceOffset = 1;
  static constexpr std::size_t kTimestampOffset = 1 + 8 + 32;
};

/// Height 0, all-zero prehash, carries the initial task queue.
KeyBlock make_genesis(std::vector<HashDigest> initial_queue);

/// Entries sorted by metric_e descending, equal metrics by digest ascending
/// (so no duplicates), and metric_best equal to the first entry (or 0 when
/// there are none).
bool ranking_consistent(const KeyBlock& kb);

}  // namespace bagchain
