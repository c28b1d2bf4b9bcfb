// SPDX-License-Identifier: Apache-2.0
#include "bagchain/net/topology.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <string>

namespace bagchain::net {

Topology::Topology(Kind kind, std::size_t n) : kind_(kind), n_(n), bw_(n * n, 0.0), adj_(n) {}

void Topology::link(NodeId u, NodeId v, double bandwidth) {
  if (u >= n_ || v >= n_) throw TopologyError("link endpoint out of range");
  if (u == v) throw TopologyError("self-loops are not allowed");
  if (!(bandwidth > 0.0)) throw TopologyError("link bandwidth must be positive");
  if (!linked(u, v)) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    std::sort(adj_[u].begin(), adj_[u].end());
    std::sort(adj_[v].begin(), adj_[v].end());
  }
  bw_[u * n_ + v] = bandwidth;
  bw_[v * n_ + u] = bandwidth;
}

Topology Topology::fully_connected(std::size_t nodes, double bandwidth) {
  if (nodes == 0) throw TopologyError("topology needs at least one node");
  Topology t(Kind::full, nodes);
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v) t.link(u, v, bandwidth);
  return t;
}

Topology Topology::erdos_renyi(std::size_t nodes, double edge_probability, double bandwidth, std::uint64_t seed) {
  if (nodes == 0) throw TopologyError("topology needs at least one node");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) throw TopologyError("edge probability must lie in (0, 1]");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Topology t(Kind::mesh, nodes);
    std::mt19937_64 rng(seed + attempt);
    std::bernoulli_distribution edge(edge_probability);
    for (NodeId u = 0; u < nodes; ++u)
      for (NodeId v = u + 1; v < nodes; ++v)
        if (edge(rng)) t.link(u, v, bandwidth);
    if (t.connected()) return t;
  }
  throw TopologyError("could not draw a connected Erdos-Renyi graph in 1000 attempts");
}

Topology Topology::from_edge_list(std::istream& in, std::size_t nodes) {
  struct Edge {
    NodeId u, v;
    double bw;
  };
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    double bw = 0.0;
    if (!(ls >> u)) continue;
    if (!(ls >> v >> bw) || u < 0 || v < 0)
      throw TopologyError("edge list line " + std::to_string(lineno) + ": expected `u v bandwidth`");
    std::string extra;
    if (ls >> extra) throw TopologyError("edge list line " + std::to_string(lineno) + ": trailing tokens");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), bw});
    max_id = std::max<std::size_t>(max_id, std::max(u, v));
  }
  if (edges.empty()) throw TopologyError("edge list is empty");
  if (nodes == 0) nodes = max_id + 1;
  if (max_id >= nodes) throw TopologyError("edge list references a node beyond the configured count");
  Topology t(Kind::mesh, nodes);
  for (const auto& e : edges) t.link(e.u, e.v, e.bw);
  if (!t.connected()) throw TopologyError("edge list graph is not connected");
  return t;
}

Topology Topology::from_file(const std::filesystem::path& path, std::size_t nodes) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open topology file " + path.string());
  return from_edge_list(in, nodes);
}

bool Topology::connected() const {
  if (n_ == 0) return false;
  std::vector<bool> seen(n_, false);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj_[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == n_;
}

std::size_t Topology::diameter() const {
  std::size_t best = 0;
  for (NodeId s = 0; s < n_; ++s) {
    std::vector<std::size_t> dist(n_, SIZE_MAX);
    std::queue<NodeId> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (auto v : adj_[u])
        if (dist[v] == SIZE_MAX) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
    }
    for (auto d : dist)
      if (d != SIZE_MAX) best = std::max(best, d);
  }
  return best;
}

std::size_t Topology::edge_count() const {
  std::size_t e = 0;
  for (const auto& a : adj_) e += a.size();
  return e / 2;
}

}  // namespace bagchain::net
