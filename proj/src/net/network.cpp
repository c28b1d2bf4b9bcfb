// SPDX-License-Identifier: Apache-2.0
#include "bagchain/net/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace bagchain::net {

void NetConfig::validate() const {
  for (double s : {miniblock_size, ensembleblock_size, keyblock_size, model_size, dataset_unit_cost})
    if (!(s >= 0.0)) throw std::invalid_argument("object sizes must be non-negative");
  if (!(direct_bandwidth > 0.0)) throw std::invalid_argument("direct bandwidth must be positive");
}

Round transfer_delay(double size, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  // Guard against 6 / 0.5 landing a hair above 12.
  double rounds = std::ceil(size / bandwidth - 1e-9);
  return std::max<Round>(1, static_cast<Round>(std::max(0.0, rounds)));
}

Network::Network(Topology topology, NetConfig config) : topo_(std::move(topology)), cfg_(config) { cfg_.validate(); }

double Network::size_of(const Payload& p) const {
  struct Visitor {
    const NetConfig& c;
    double operator()(const MiniBlock&) const { return c.miniblock_size; }
    double operator()(const EnsembleBlock&) const { return c.ensembleblock_size; }
    double operator()(const KeyBlock&) const { return c.keyblock_size; }
    double operator()(const DatasetPublication& d) const {
      return d.data ? c.dataset_unit_cost * static_cast<double>(d.data->rows()) : 0.0;
    }
    double operator()(const FetchRequest&) const { return 0.0; }
    double operator()(const FetchResponse&) const { return c.model_size; }
    double operator()(const FetchDeferred&) const { return 0.0; }
  };
  return std::visit(Visitor{cfg_}, p);
}

Round Network::hop_delay(NodeId u, NodeId v, const Payload& p) const {
  if (!topo_.linked(u, v)) throw std::invalid_argument("no link between nodes");
  if (cfg_.keyblock_link_delay > 0 && std::holds_alternative<KeyBlock>(p)) return cfg_.keyblock_link_delay;
  return transfer_delay(size_of(p), topo_.bandwidth(u, v));
}

Round Network::path_delay(NodeId src, NodeId dst, double size) const {
  if (src == dst) return 0;
  const auto n = topo_.size();
  std::vector<Round> dist(n, std::numeric_limits<Round>::max());
  using Item = std::pair<Round, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    if (u == dst) return d;
    for (auto v : topo_.neighbors(u)) {
      Round nd = d + transfer_delay(size, topo_.bandwidth(u, v));
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  throw std::logic_error("destination unreachable");
}

void Network::schedule(Message m) {
  if (m.deliver_at < m.sent + 1) throw std::logic_error("messages must take at least one round");
  queue_[m.deliver_at].push_back(std::move(m));
}

std::size_t Network::broadcast(NodeId src, const Payload& p, Round now, std::optional<NodeId> skip) {
  const auto digest = payload_digest(p);
  const double size = size_of(p);
  std::size_t sent = 0;
  for (auto v : topo_.neighbors(src)) {
    if (skip && *skip == v) continue;
    schedule(Message{p, src, v, size, now, now + hop_delay(src, v, p), digest});
    ++sent;
  }
  return sent;
}

void Network::unicast(NodeId src, NodeId dst, const Payload& p, Round now) {
  const double size = size_of(p);
  Round delay = std::max<Round>(1, path_delay(src, dst, size));
  schedule(Message{p, src, dst, size, now, now + delay, payload_digest(p)});
}

void Network::deliver_direct(NodeId src, NodeId dst, const Payload& p, Round now) {
  const double size = size_of(p);
  schedule(Message{p, src, dst, size, now, now + transfer_delay(size, cfg_.direct_bandwidth), payload_digest(p)});
}

std::vector<Message> Network::step(Round now) {
  std::vector<Message> out;
  // Anything scheduled for an earlier round would have been a missed step.
  while (!queue_.empty() && queue_.begin()->first <= now) {
    auto node = queue_.extract(queue_.begin());
    auto& batch = node.mapped();
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  std::stable_sort(out.begin(), out.end(), [](const Message& a, const Message& b) {
    if (a.dst != b.dst) return a.dst < b.dst;
    if (a.src != b.src) return a.src < b.src;
    return a.digest < b.digest;
  });
  delivered_ += out.size();
  return out;
}

std::size_t Network::in_flight() const {
  std::size_t n = 0;
  for (const auto& [r, batch] : queue_) n += batch.size();
  return n;
}

}  // namespace bagchain::net
