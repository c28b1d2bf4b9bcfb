// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/task_queue.hpp"

#include "bagchain/chain/types.hpp"

namespace bagchain {

std::vector<HashDigest> push_task_queue(const std::vector<HashDigest>& queue, const HashDigest& completed,
                                        const HashDigest& incoming) {
  if (queue.empty()) throw ProtocolViolation("task queue is empty");
  if (queue.front() != completed)
    throw ProtocolViolation("completed task " + completed.short_hex() + " is not the queue head " +
                            queue.front().short_hex());
  std::vector<HashDigest> out(queue.begin() + 1, queue.end());
  out.push_back(incoming);
  return out;
}

}  // namespace bagchain
