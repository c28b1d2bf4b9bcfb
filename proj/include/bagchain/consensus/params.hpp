// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"
#include "bagchain/kernels/exec.hpp"

namespace bagchain::consensus {

enum class Strategy : std::uint8_t {
  honest,
  plagiarist,       // claims another miner's ModelHash under its own ID
  metric_inflater,  // overstates metric_v on its EnsembleBlocks
  withholder,       // never releases its model parameters
};

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy s);

struct ConsensusParams {
  HashDigest target = target_from_exponent(244);
  std::uint32_t hash_trials = 1;  // q, nonce trials per round
  bool cfs = false;
  std::uint64_t keyblock_reward = 50;
  Round fetch_retry = 2;  // rounds to wait after a deferred fetch
  kernels::Exec exec = kernels::Exec::serial;
};

}  // namespace bagchain::consensus
