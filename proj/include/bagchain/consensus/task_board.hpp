// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "bagchain/chain/types.hpp"
#include "bagchain/ml/dataset.hpp"

namespace bagchain::consensus {

struct TaskEntry {
  Task task;
  HashDigest id;
  std::shared_ptr<const ml::Dataset> validation;
  std::shared_ptr<const ml::Dataset> test;
};

/// The requester's task pool in FIFO order. The task executed at height h is
/// pool[h-1]; the KeyBlock at height h appends pool[h-1+Q] to the queue, so a
/// task entering the queue at height h executes at height h + Q.
/// Shared read-only by all miners; D_V and D_E are only used by a miner after
/// their publication reaches it.
class TaskBoard {
 public:
  TaskBoard(std::shared_ptr<const ml::Dataset> public_train, std::vector<TaskEntry> pool, std::size_t queue_length);

  [[nodiscard]] const ml::Dataset& public_train() const { return *public_train_; }
  [[nodiscard]] std::size_t queue_length() const { return queue_length_; }
  [[nodiscard]] std::size_t size() const { return pool_.size(); }
  [[nodiscard]] const TaskEntry& at(std::size_t index) const { return pool_.at(index); }

  [[nodiscard]] const TaskEntry* for_height(Height h) const;
  [[nodiscard]] const TaskEntry* incoming_at(Height h) const;
  [[nodiscard]] const TaskEntry* find(const HashDigest& id) const;

  [[nodiscard]] std::vector<HashDigest> initial_queue() const;
  [[nodiscard]] KeyBlock genesis() const;

 private:
  std::shared_ptr<const ml::Dataset> public_train_;
  std::vector<TaskEntry> pool_;
  std::size_t queue_length_;
  std::unordered_map<HashDigest, std::size_t, HashDigestHasher> index_;
};

}  // namespace bagchain::consensus
