// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>

#include "bagchain/chain/block_store.hpp"

using namespace bagchain;

namespace {

HashDigest tag(const std::string& s) { return canonical_hash(std::string_view(s)); }

KeyBlock child(const KeyBlock& parent, std::uint64_t salt, Fraction best = {0, 1}) {
  KeyBlock kb;
  kb.prehash = parent.digest();
  kb.height = parent.height + 1;
  kb.nonce = salt;
  kb.metric_best = best;
  kb.task_queue = parent.task_queue;
  return kb;
}

}  // namespace

TEST_CASE("longest chain wins") {
  auto g = make_genesis({tag("t")});
  BlockStore s(g);
  KeyBlock a = g, b = g;
  std::vector<KeyBlock> long_branch, short_branch;
  for (int i = 0; i < 5; ++i) long_branch.push_back(a = child(a, 100 + i));
  for (int i = 0; i < 4; ++i) short_branch.push_back(b = child(b, 200 + i, {1, 1}));
  for (auto& kb : short_branch) s.add_keyblock(kb);
  for (auto& kb : long_branch) s.add_keyblock(kb);
  CHECK(s.best_tip() == long_branch.back().digest());
  auto chain = s.main_chain();
  REQUIRE(chain.size() == 6);
  CHECK(chain.front() == s.genesis_digest());
  for (std::size_t i = 1; i < chain.size(); ++i) {
    CHECK(s.keyblock(chain[i])->prehash == chain[i - 1]);
    CHECK(s.keyblock(chain[i])->height == i);
  }
}

TEST_CASE("equal height prefers larger metric_best") {
  auto g = make_genesis({tag("t")});
  BlockStore s(g);
  auto x = child(g, 1, {91, 100});
  auto y = child(g, 2, {88, 100});
  s.add_keyblock(y);
  s.add_keyblock(x);
  CHECK(s.best_tip() == x.digest());
}

TEST_CASE("equal height and metric: smaller digest wins in any arrival order") {
  auto g = make_genesis({tag("t")});
  std::vector<KeyBlock> tips;
  for (std::uint64_t i = 0; i < 5; ++i) tips.push_back(child(g, i, {9, 10}));
  auto smallest = std::min_element(tips.begin(), tips.end(), [](const KeyBlock& a, const KeyBlock& b) {
                    return a.digest() < b.digest();
                  })->digest();
  std::vector<std::size_t> order = {0, 1, 2, 3, 4};
  do {
    BlockStore s(g);
    for (auto i : order) s.add_keyblock(tips[i]);
    CHECK(s.best_tip() == smallest);
  } while (std::next_permutation(order.begin(), order.end()));
  // Value comparison: 9/10 and 18/20 tie.
  auto other = child(g, 99, {18, 20});
  BlockStore s(g);
  s.add_keyblock(other);
  for (auto& t : tips) s.add_keyblock(t);
  CHECK(s.best_tip() == std::min(smallest, other.digest()));
}

TEST_CASE("prefer_tip orders height first") {
  auto g = make_genesis({tag("t")});
  auto h1 = child(g, 1, {1, 1});
  auto h2 = child(h1, 2, {0, 1});
  CHECK(prefer_tip(h2, h2.digest(), h1, h1.digest()));
  CHECK(!prefer_tip(h1, h1.digest(), h2, h2.digest()));
}

TEST_CASE("structural checks and orphans") {
  auto g = make_genesis({tag("t")});
  BlockStore s(g);
  auto a = child(g, 1);
  auto b = child(a, 2);
  auto c = child(b, 3);
  CHECK_THROWS_AS(s.add_keyblock(b), ProtocolViolation);
  auto wrong = child(g, 5);
  wrong.height = 3;
  CHECK_THROWS_AS(s.add_keyblock(wrong), ProtocolViolation);

  s.add_orphan(c);
  s.add_orphan(b);
  CHECK(s.orphan_count() == 2);
  CHECK(s.is_orphan(b.digest()));
  CHECK(s.add_keyblock(a));
  CHECK(!s.add_keyblock(a));
  auto ready = s.take_orphans(a.digest());
  REQUIRE(ready.size() == 1);
  CHECK(ready[0] == b);
  s.add_keyblock(b);
  ready = s.take_orphans(b.digest());
  REQUIRE(ready.size() == 1);
  s.add_keyblock(ready[0]);
  CHECK(s.orphan_count() == 0);
  CHECK(s.best_tip() == c.digest());
  CHECK(s.is_ancestor(a.digest(), c.digest()));
  CHECK(!s.is_ancestor(c.digest(), a.digest()));
  CHECK(s.keyblocks_at(1).size() == 1);
  CHECK(s.children(g.digest()).size() == 1);
}

TEST_CASE("miniblock and ensembleblock indices") {
  auto g = make_genesis({tag("t")});
  BlockStore s(g);
  MiniBlock mb;
  mb.height = 1;
  mb.prehash = g.digest();
  mb.model_hash = tag("m");
  CHECK(s.add_miniblock(mb));
  CHECK(!s.add_miniblock(mb));
  CHECK(s.miniblocks_at(1).size() == 1);
  CHECK(s.miniblocks_at(2).empty());
  CHECK(*s.miniblock(mb.digest()) == mb);

  EnsembleBlock eb;
  eb.height = 1;
  eb.miniblock_hashes = {mb.digest()};
  eb.metric_v = {1, 2};
  CHECK(s.add_ensembleblock(eb));
  CHECK(s.ensembleblocks_at(1).front() == eb.digest());
  CHECK(s.ensembleblock(tag("nope")) == nullptr);
}

TEST_CASE("stored blocks re-encode to their digest") {
  auto g = make_genesis({tag("t"), tag("u")});
  BlockStore s(g);
  KeyBlock kb = child(g, 7, {3, 4});
  kb.eb_entries = {{tag("e"), {3, 4}}};
  s.add_keyblock(kb);
  const KeyBlock* stored = s.keyblock(kb.digest());
  CHECK(KeyBlock::decode(stored->encode()).digest() == kb.digest());
}
