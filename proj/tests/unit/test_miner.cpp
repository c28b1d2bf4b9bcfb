// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <map>

#include "bagchain/consensus/miner.hpp"
#include "bagchain/net/network.hpp"
#include "fixture.hpp"

using namespace bagchain;
using namespace bagchain::consensus;
using bagchain::testing::FixtureConfig;
using Kind = MinerEvent::Kind;

namespace {

// Minimal round loop: the requester publishes D_V / D_E for h+1 at
// (first KeyBlock at h) + 100 / + 110, like the real driver.
struct World {
  FixtureConfig cfg;
  std::shared_ptr<const TaskBoard> board;
  ConsensusParams params;
  net::Network net;
  ml::Dataset no_private;
  std::vector<std::unique_ptr<Miner>> miners;
  std::vector<MinerEvent> events;
  std::map<Round, std::vector<std::pair<Height, net::DatasetKind>>> schedule;
  std::set<Height> anchored;
  Round now = 0;

  World(std::vector<Strategy> strategies, net::Topology topo, unsigned exponent = 250)
      : board(testing::make_board(cfg)), net(std::move(topo)) {
    params.target = target_from_exponent(exponent);
    no_private = ml::Dataset(cfg.features, cfg.classes, ml::DatasetRole::private_train);
    for (std::size_t i = 0; i < strategies.size(); ++i)
      miners.push_back(std::make_unique<Miner>(MinerConfig{static_cast<MinerId>(i), strategies[i], 5, net.gossip()},
                                               params, *board, no_private));
    anchor(1, 0);
  }

  void anchor(Height h, Round at) {
    if (!anchored.insert(h).second || board->for_height(h) == nullptr) return;
    schedule[at + 100].push_back({h, net::DatasetKind::validation});
    schedule[at + 110].push_back({h, net::DatasetKind::test});
  }

  void publish_due() {
    auto it = schedule.find(now);
    if (it == schedule.end()) return;
    for (auto [h, kind] : it->second) {
      net::DatasetPublication pub;
      pub.height = h;
      pub.kind = kind;
      pub.timestamp = now;
      pub.task_id = board->for_height(h)->id;
      pub.data = kind == net::DatasetKind::validation ? board->for_height(h)->validation : board->for_height(h)->test;
      for (std::size_t i = 0; i < miners.size(); ++i)
        net.deliver_direct(static_cast<net::NodeId>(miners.size()), static_cast<net::NodeId>(i), pub, now);
    }
  }

  void step() {
    ++now;
    std::vector<std::vector<net::Message>> inbox(miners.size());
    for (auto& m : net.step(now)) inbox[m.dst].push_back(std::move(m));
    for (std::size_t i = 0; i < miners.size(); ++i) {
      auto out = miners[i]->step(now, inbox[i]);
      for (auto& msg : out.messages) {
        if (msg.mode == Outbound::Mode::broadcast)
          net.broadcast(static_cast<net::NodeId>(i), msg.payload, now, msg.skip);
        else
          net.unicast(static_cast<net::NodeId>(i), msg.dst, msg.payload, now);
      }
      for (auto& ev : out.events) {
        if (ev.kind == Kind::keyblock_generated || ev.kind == Kind::keyblock_adopted) anchor(ev.height + 1, now);
        events.push_back(std::move(ev));
      }
    }
    publish_due();
  }

  void run_until(const std::function<bool()>& done, Round limit = 20000) {
    while (!done() && now < limit) step();
    REQUIRE(done());
  }

  Height height_of(std::size_t i) const { return miners[i]->store().keyblock(miners[i]->tip())->height; }

  std::size_t count(Kind k, std::optional<MinerId> who = std::nullopt) const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const MinerEvent& e) {
      return e.kind == k && (!who || e.miner == *who);
    }));
  }
};

net::Message wrap(const net::Payload& p, net::NodeId src, net::NodeId dst, Round now) {
  return net::Message{p, src, dst, 0, now, now, net::payload_digest(p)};
}

}  // namespace

TEST_CASE("honest miners walk through the three phases and agree") {
  World w({Strategy::honest, Strategy::honest, Strategy::honest}, net::Topology::fully_connected(3, 0.5));
  w.step();
  for (auto& m : w.miners) CHECK(m->phase() == Phase::training);
  CHECK(w.count(Kind::miniblock_generated) == 3);
  while (w.now < 101) w.step();
  for (auto& m : w.miners) CHECK(m->phase() == Phase::ensembling);
  while (w.now < 111) w.step();
  for (auto& m : w.miners) CHECK(m->phase() == Phase::mining);
  CHECK(w.count(Kind::ensemble_generated) == 3);

  w.run_until([&] {
    for (std::size_t i = 0; i < 3; ++i)
      if (w.height_of(i) < 3) return false;
    return true;
  });
  CHECK(w.count(Kind::rejected) == 0);
  CHECK(w.count(Kind::dropped) == 0);
  // Everyone holds the same chain prefix.
  auto chain0 = w.miners[0]->store().main_chain();
  for (std::size_t i = 1; i < 3; ++i) {
    auto chain = w.miners[i]->store().main_chain();
    for (std::size_t k = 0; k < 3; ++k) CHECK(chain[k] == chain0[k]);
  }
  // Every main-chain KeyBlock pays the fee across the three producers.
  for (std::size_t k = 1; k < 3; ++k) {
    const KeyBlock* kb = w.miners[0]->store().keyblock(chain0[k]);
    REQUIRE(!kb->eb_entries.empty());
    std::uint64_t fees = 0;
    for (const auto& p : kb->payload)
      if (p.kind == PayloadKind::training_fee_share) fees += p.amount;
    CHECK(fees == w.cfg.fee);
  }
}

TEST_CASE("tip change starts Phase I for the next height") {
  World w({Strategy::honest, Strategy::honest}, net::Topology::fully_connected(2, 0.5));
  auto first_move = [&]() -> const MinerEvent* {
    for (const auto& e : w.events)
      if (e.kind == Kind::keyblock_adopted || e.kind == Kind::keyblock_generated) return &e;
    return nullptr;
  };
  w.run_until([&] { return first_move() != nullptr; });
  const MinerEvent moved = *first_move();
  auto& m = *w.miners[moved.miner];
  CHECK(m.phase() == Phase::training);
  CHECK(m.phase_anchor() == moved.round);
  // A MiniBlock for the new height goes out right away (next round after an own KeyBlock).
  w.step();
  CHECK(std::any_of(w.events.begin(), w.events.end(), [&](const MinerEvent& e) {
    return e.kind == Kind::miniblock_generated && e.miner == moved.miner && e.round <= moved.round + 1 && e.height == 2;
  }));
}

TEST_CASE("duplicates are not re-forwarded") {
  auto board = testing::make_board({});
  ConsensusParams params;
  ml::Dataset none(4, 3, ml::DatasetRole::private_train);
  Miner m({1, Strategy::honest, 3, true}, params, *board, none);
  MiniBlock mb;
  mb.timestamp = 1;
  mb.height = 1;
  mb.task_id = board->for_height(1)->id;
  mb.model_hash = canonical_hash(std::string_view("m"));
  mb.miner_id = 0;
  mb.prehash = m.tip();
  std::vector<net::Message> inbox{wrap(mb, 0, 1, 2), wrap(mb, 2, 1, 2)};
  auto out = m.step(2, inbox);
  auto relays = std::count_if(out.messages.begin(), out.messages.end(), [](const Outbound& o) {
    return o.mode == Outbound::Mode::broadcast && std::holds_alternative<MiniBlock>(o.payload) &&
           std::get<MiniBlock>(o.payload).miner_id == 0;
  });
  CHECK(relays == 1);
  auto again = m.step(3, std::vector<net::Message>{wrap(mb, 2, 1, 3)});
  CHECK(std::none_of(again.messages.begin(), again.messages.end(), [](const Outbound& o) {
    return std::holds_alternative<MiniBlock>(o.payload) && std::get<MiniBlock>(o.payload).miner_id == 0;
  }));
}

TEST_CASE("late MiniBlocks are rejected on arrival") {
  auto board = testing::make_board({});
  ConsensusParams params;
  ml::Dataset none(4, 3, ml::DatasetRole::private_train);
  Miner m({1, Strategy::honest, 3, false}, params, *board, none);
  net::DatasetPublication pub;
  pub.height = 1;
  pub.kind = net::DatasetKind::validation;
  pub.timestamp = 100;
  pub.task_id = board->for_height(1)->id;
  pub.data = board->for_height(1)->validation;
  m.step(101, std::vector<net::Message>{wrap(pub, 9, 1, 101)});
  MiniBlock mb;
  mb.timestamp = 100;
  mb.height = 1;
  mb.task_id = pub.task_id;
  mb.miner_id = 0;
  mb.prehash = m.tip();
  auto out = m.step(102, std::vector<net::Message>{wrap(mb, 0, 1, 102)});
  REQUIRE(!out.events.empty());
  CHECK(out.events[0].kind == Kind::rejected);
  CHECK(out.events[0].reason == Reason::late_miniblock);
  CHECK(m.store().miniblock(mb.digest()) == nullptr);
  CHECK(m.rejected() == 1);

  // Forged publications are dropped.
  auto forged = pub;
  forged.data = board->for_height(1)->test;
  auto o2 = m.step(103, std::vector<net::Message>{wrap(forged, 9, 1, 103)});
  CHECK(m.dropped() == 1);
}

TEST_CASE("model release waits for the validation set") {
  auto board = testing::make_board({});
  ConsensusParams params;
  ml::Dataset none(4, 3, ml::DatasetRole::private_train);
  for (auto strategy : {Strategy::honest, Strategy::withholder}) {
    Miner m({0, strategy, 3, false}, params, *board, none);
    auto out = m.step(1, {});
    REQUIRE(out.events.size() == 1);
    const auto hash = out.events[0].miniblock->model_hash;
    net::FetchRequest req{hash, 0, 1};
    auto before = m.step(2, std::vector<net::Message>{wrap(req, 1, 0, 2)});
    REQUIRE(before.messages.size() == 1);
    CHECK(std::holds_alternative<net::FetchDeferred>(before.messages[0].payload));

    net::DatasetPublication pub;
    pub.height = 1;
    pub.kind = net::DatasetKind::validation;
    pub.timestamp = 100;
    pub.task_id = board->for_height(1)->id;
    pub.data = board->for_height(1)->validation;
    auto after = m.step(101, std::vector<net::Message>{wrap(pub, 9, 0, 101), wrap(req, 1, 0, 101)});
    auto response = std::find_if(after.messages.begin(), after.messages.end(), [](const Outbound& o) {
      return std::holds_alternative<net::FetchResponse>(o.payload) || std::holds_alternative<net::FetchDeferred>(o.payload);
    });
    REQUIRE(response != after.messages.end());
    if (strategy == Strategy::honest) {
      REQUIRE(std::holds_alternative<net::FetchResponse>(response->payload));
      const auto& bytes = *std::get<net::FetchResponse>(response->payload).model_bytes;
      CHECK(ml::model_hash(bytes, 0) == hash);
    } else {
      CHECK(std::holds_alternative<net::FetchDeferred>(response->payload));
    }
  }
}

TEST_CASE("own model depends on seed, miner and height only") {
  auto board = testing::make_board({});
  ConsensusParams params;
  ml::Dataset none(4, 3, ml::DatasetRole::private_train);
  Miner a({0, Strategy::honest, 3, false}, params, *board, none);
  Miner b({0, Strategy::honest, 3, false}, params, *board, none);
  Miner c({1, Strategy::honest, 3, false}, params, *board, none);
  CHECK(a.own_model(1)->model_hash == b.own_model(1)->model_hash);
  CHECK(a.own_model(1)->model_hash != a.own_model(2)->model_hash);
  CHECK(a.own_model(1)->model_hash != c.own_model(1)->model_hash);
  // No private data: D_Ti = D_T, models differ through the bootstrap only.
  CHECK(a.local_train() == board->public_train());
  CHECK(a.own_model(1)->omega_hash != c.own_model(1)->omega_hash);
}

TEST_CASE("plagiarised MiniBlocks never make it into an honest ensemble") {
  World w({Strategy::honest, Strategy::honest, Strategy::plagiarist}, net::Topology::fully_connected(3, 0.5));
  w.run_until([&] { return w.height_of(0) >= 2 && w.height_of(1) >= 2; });
  std::set<HashDigest> plagiarist_mbs;
  for (const auto& e : w.events)
    if (e.kind == Kind::miniblock_generated && e.miner == 2) plagiarist_mbs.insert(e.digest);
  CHECK(!plagiarist_mbs.empty());
  for (const auto& e : w.events) {
    if (e.kind != Kind::ensemble_generated || e.miner == 2) continue;
    for (const auto& d : e.ensemble->miniblock_hashes) CHECK(plagiarist_mbs.count(d) == 0);
  }
  for (const auto& d : w.miners[0]->store().main_chain()) {
    for (const auto& p : w.miners[0]->store().keyblock(d)->payload)
      if (p.kind == PayloadKind::training_fee_share) CHECK(p.payee != 2);
  }
}

TEST_CASE("inflated ensembles are refused by honest miners") {
  World w({Strategy::honest, Strategy::honest, Strategy::metric_inflater}, net::Topology::fully_connected(3, 0.5), 247);
  w.run_until([&] { return w.count(Kind::keyblock_generated, 2) > 0 && w.height_of(0) >= 2; });
  // Every KeyBlock the inflater mined lists its own inflated ensemble and is rejected.
  std::set<HashDigest> bad;
  for (const auto& e : w.events)
    if (e.kind == Kind::keyblock_generated && e.miner == 2) bad.insert(e.digest);
  for (const auto& e : w.events)
    if (e.kind == Kind::keyblock_adopted && e.miner != 2) CHECK(bad.count(e.digest) == 0);
  CHECK(std::any_of(w.events.begin(), w.events.end(), [&](const MinerEvent& e) {
    return e.kind == Kind::rejected && e.miner != 2 && bad.count(e.digest) && e.reason == Reason::invalid_ensemble;
  }));
}
