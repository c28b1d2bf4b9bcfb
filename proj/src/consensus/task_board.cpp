// SPDX-License-Identifier: Apache-2.0
#include "bagchain/consensus/task_board.hpp"

namespace bagchain::consensus {

TaskBoard::TaskBoard(std::shared_ptr<const ml::Dataset> public_train, std::vector<TaskEntry> pool,
                     std::size_t queue_length)
    : public_train_(std::move(public_train)), pool_(std::move(pool)), queue_length_(queue_length) {
  if (!public_train_) throw std::invalid_argument("task board needs the public training set");
  if (queue_length_ == 0) throw std::invalid_argument("task queue length must be at least 1");
  if (pool_.size() < queue_length_) throw std::invalid_argument("task pool shorter than the queue");
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    pool_[i].task.validate();
    if (pool_[i].id != pool_[i].task.id()) throw std::invalid_argument("task entry id does not match its task");
    if (!index_.emplace(pool_[i].id, i).second) throw std::invalid_argument("duplicate task in pool");
  }
}

const TaskEntry* TaskBoard::for_height(Height h) const {
  if (h == 0 || h > pool_.size()) return nullptr;
  return &pool_[h - 1];
}

const TaskEntry* TaskBoard::incoming_at(Height h) const {
  if (h == 0 || h - 1 + queue_length_ >= pool_.size()) return nullptr;
  return &pool_[h - 1 + queue_length_];
}

const TaskEntry* TaskBoard::find(const HashDigest& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &pool_[it->second];
}

std::vector<HashDigest> TaskBoard::initial_queue() const {
  std::vector<HashDigest> q;
  for (std::size_t i = 0; i < queue_length_; ++i) q.push_back(pool_[i].id);
  return q;
}

KeyBlock TaskBoard::genesis() const { return make_genesis(initial_queue()); }

}  // namespace bagchain::consensus
