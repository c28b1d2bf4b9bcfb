// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bagchain/net/message.hpp"
#include "bagchain/net/topology.hpp"

namespace bagchain::net {

struct NetConfig {
  double miniblock_size = 2.0;
  double ensembleblock_size = 2.0;
  double keyblock_size = 6.0;
  double model_size = 1.0;
  double dataset_unit_cost = 0.0;  // data units per sample
  /// Bandwidth used for requester publications, which bypass the topology.
  double direct_bandwidth = 0.5;
  /// When non-zero, every KeyBlock hop takes exactly this many rounds.
  Round keyblock_link_delay = 0;

  void validate() const;
};

/// Rounds to push `size` units over a link of `bandwidth`: ceil(size/bw), at least 1.
Round transfer_delay(double size, double bandwidth);

/// Round-based message transport. Messages are scheduled when sent and
/// released by step() on their delivery round.
class Network {
 public:
  explicit Network(Topology topology, NetConfig config = {});

  [[nodiscard]] const Topology& topology() const { return topo_; }
  [[nodiscard]] const NetConfig& config() const { return cfg_; }
  /// Mesh networks rely on receivers re-broadcasting; full ones do not.
  [[nodiscard]] bool gossip() const { return topo_.kind() == Topology::Kind::mesh; }

  [[nodiscard]] double size_of(const Payload& p) const;
  [[nodiscard]] Round hop_delay(NodeId u, NodeId v, const Payload& p) const;
  /// Cheapest total delay from src to dst for an object of `size`, store-and-forward per hop.
  [[nodiscard]] Round path_delay(NodeId src, NodeId dst, double size) const;

  /// To every other node (full) or to each neighbour except `skip` (mesh).
  /// Returns the number of messages scheduled.
  std::size_t broadcast(NodeId src, const Payload& p, Round now, std::optional<NodeId> skip = std::nullopt);
  /// Point-to-point along the cheapest path; one message delivered after path_delay.
  void unicast(NodeId src, NodeId dst, const Payload& p, Round now);
  /// Outside the topology (requester to miner), delay = transfer_delay(size, direct_bandwidth).
  void deliver_direct(NodeId src, NodeId dst, const Payload& p, Round now);

  /// Messages due at `now`, sorted by (destination, source, payload digest).
  std::vector<Message> step(Round now);
  [[nodiscard]] std::size_t in_flight() const;
  [[nodiscard]] std::size_t delivered() const { return delivered_; }

 private:
  void schedule(Message m);

  Topology topo_;
  NetConfig cfg_;
  std::map<Round, std::vector<Message>> queue_;
  std::size_t delivered_ = 0;
};

}  // namespace bagchain::net
