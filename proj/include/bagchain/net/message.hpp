// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "bagchain/chain/types.hpp"
#include "bagchain/ml/dataset.hpp"
#include "bagchain/net/topology.hpp"

namespace bagchain::net {

enum class DatasetKind : std::uint8_t { validation = 1, test = 2 };

/// Requester announcement of D_V or D_E for one height. The dataset itself
/// is shared read-only; `commitment` must match the task's commitment.
struct DatasetPublication {
  Height height = 0;
  DatasetKind kind = DatasetKind::validation;
  Round timestamp = 0;
  HashDigest task_id;
  ActorId requester_id = 0;
  std::shared_ptr<const ml::Dataset> data;

  [[nodiscard]] HashDigest digest() const;
};

/// Ask `owner` for the parameters behind the claimed `model_hash`.
struct FetchRequest {
  HashDigest model_hash;
  MinerId owner = 0;
  MinerId requester = 0;
  [[nodiscard]] HashDigest digest() const;
};

struct FetchResponse {
  HashDigest model_hash;
  MinerId owner = 0;
  MinerId requester = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> model_bytes;
  [[nodiscard]] HashDigest digest() const;
};

/// The owner has not released the model yet; the requester retries later.
struct FetchDeferred {
  HashDigest model_hash;
  MinerId owner = 0;
  MinerId requester = 0;
  [[nodiscard]] HashDigest digest() const;
};

using Payload = std::variant<MiniBlock, EnsembleBlock, KeyBlock, DatasetPublication, FetchRequest, FetchResponse,
                             FetchDeferred>;

HashDigest payload_digest(const Payload& p);

struct Message {
  Payload payload;
  NodeId src = 0;
  NodeId dst = 0;
  double size = 0.0;
  Round sent = 0;
  Round deliver_at = 0;
  HashDigest digest;
};

}  // namespace bagchain::net
