// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <vector>

namespace bagchain::net {

using NodeId = std::uint32_t;

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Undirected graph with a bandwidth (data units per round) on each link.
/// A bandwidth of 0 means no link.
class Topology {
 public:
  enum class Kind { full, mesh };

  static Topology fully_connected(std::size_t nodes, double bandwidth);
  /// G(n, p) redrawn with successive seeds until connected (at most 1000 draws).
  static Topology erdos_renyi(std::size_t nodes, double edge_probability, double bandwidth, std::uint64_t seed);
  /// One `u v bandwidth` triple per line; blank lines and `#` comments skipped.
  /// `nodes` = 0 sizes the graph from the largest node id.
  static Topology from_edge_list(std::istream& in, std::size_t nodes = 0);
  static Topology from_file(const std::filesystem::path& path, std::size_t nodes = 0);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double bandwidth(NodeId u, NodeId v) const { return bw_[u * n_ + v]; }
  [[nodiscard]] bool linked(NodeId u, NodeId v) const { return bandwidth(u, v) > 0.0; }
  [[nodiscard]] const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }
  [[nodiscard]] bool connected() const;
  /// Longest shortest path, in hops.
  [[nodiscard]] std::size_t diameter() const;
  [[nodiscard]] std::size_t edge_count() const;

 private:
  Topology(Kind kind, std::size_t n);
  void link(NodeId u, NodeId v, double bandwidth);

  Kind kind_ = Kind::full;
  std::size_t n_ = 0;
  std::vector<double> bw_;
  std::vector<std::vector<NodeId>> adj_;
};

}  // namespace bagchain::net
