// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"

namespace bagchain::consensus {

enum class Reason : std::uint8_t {
  ok,
  // still waiting on something
  pending_model,
  pending_block,
  pending_dataset,
  pending_parent,
  // MiniBlock
  wrong_task,
  wrong_height,
  wrong_parent,
  late_miniblock,
  ownership_mismatch,
  plagiarized_model,
  malformed_model,
  underperforming,
  // EnsembleBlock
  malformed_ensemble,
  invalid_miniblock,
  duplicate_model,
  metric_v_mismatch,
  ensemble_below_min,
  // KeyBlock
  pow_failed,
  ranking_inconsistent,
  queue_mismatch,
  invalid_ensemble,
  metric_e_mismatch,
  prehash_vote_mismatch,
  merkle_mismatch,
  payload_mismatch,
};

std::string_view to_string(Reason r);

/// Something the validator needs before it can decide.
struct Need {
  enum class Kind : std::uint8_t { model, block, dataset, parent } kind = Kind::block;
  HashDigest digest;  // model hash, block digest or parent digest
  MinerId owner = 0;  // model holder
  Height height = 0;  // dataset height
};

struct Verdict {
  enum class Status : std::uint8_t { valid, invalid, pending } status = Status::valid;
  Reason reason = Reason::ok;
  std::vector<Need> needs;

  static Verdict valid() { return {}; }
  static Verdict invalid(Reason r) { return {Status::invalid, r, {}}; }
  static Verdict pending(Reason r, std::vector<Need> needs) { return {Status::pending, r, std::move(needs)}; }

  [[nodiscard]] bool is_valid() const { return status == Status::valid; }
  [[nodiscard]] bool is_invalid() const { return status == Status::invalid; }
  [[nodiscard]] bool is_pending() const { return status == Status::pending; }
};

}  // namespace bagchain::consensus
