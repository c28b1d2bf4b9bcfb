// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/types.hpp"

#include <algorithm>
#include <set>

namespace bagchain {

namespace {
enum Tag : std::uint8_t { kTask = 0x54, kMiniBlock = 0x4d, kEnsembleBlock = 0x45, kKeyBlock = 0x4b, kPayload = 0x50 };

void put_fraction(Encoder& enc, const Fraction& f) { enc.u64(f.num).u64(f.den); }
Fraction get_fraction(Decoder& dec) {
  Fraction f;
  f.num = dec.u64();
  f.den = dec.u64();
  return f;
}
void expect_tag(Decoder& dec, std::uint8_t tag) {
  if (dec.u8() != tag) throw DecodeError("unexpected block tag");
}
}  // namespace

void Task::validate() const {
  if (!metric_min.in_unit_interval()) throw ProtocolViolation("task metric_min must lie in [0, 1]");
  if (train_commit == val_commit || train_commit == test_commit || val_commit == test_commit)
    throw ProtocolViolation("task dataset commitments must be pairwise distinct");
  learner_spec.validate();
}

std::vector<std::uint8_t> Task::encode() const {
  Encoder enc;
  enc.u8(kTask)
      .digest(train_commit)
      .digest(val_commit)
      .digest(test_commit)
      .u8(static_cast<std::uint8_t>(learner))
      .u32(learner_spec.max_depth)
      .u32(learner_spec.min_leaf)
      .u8(static_cast<std::uint8_t>(aggregate_rule))
      .u8(static_cast<std::uint8_t>(metric_rule));
  put_fraction(enc, metric_min);
  enc.u64(fee).u32(requester_id);
  return enc.take();
}

HashDigest Task::id() const { return canonical_hash(encode()); }

std::vector<std::uint8_t> MiniBlock::encode() const {
  Encoder enc;
  enc.u8(kMiniBlock).u64(timestamp).digest(task_id).digest(model_hash).u32(miner_id).digest(prehash).u64(height);
  return enc.take();
}

HashDigest MiniBlock::digest() const { return canonical_hash(encode()); }

MiniBlock MiniBlock::decode(std::span<const std::uint8_t> bytes) {
  Decoder dec(bytes);
  expect_tag(dec, kMiniBlock);
  MiniBlock mb;
  mb.timestamp = dec.u64();
  mb.task_id = dec.digest();
  mb.model_hash = dec.digest();
  mb.miner_id = dec.u32();
  mb.prehash = dec.digest();
  mb.height = dec.u64();
  if (!dec.done()) throw DecodeError("trailing bytes after MiniBlock");
  return mb;
}

bool EnsembleBlock::well_formed() const {
  if (miniblock_hashes.empty() || !metric_v.in_unit_interval()) return false;
  std::set<HashDigest> seen(miniblock_hashes.begin(), miniblock_hashes.end());
  return seen.size() == miniblock_hashes.size();
}

std::vector<std::uint8_t> EnsembleBlock::encode() const {
  Encoder enc;
  enc.u8(kEnsembleBlock).u32(static_cast<std::uint32_t>(miniblock_hashes.size()));
  for (const auto& h : miniblock_hashes) enc.digest(h);
  put_fraction(enc, metric_v);
  enc.u32(miner_id).digest(task_id).u64(timestamp).u64(height);
  return enc.take();
}

HashDigest EnsembleBlock::digest() const { return canonical_hash(encode()); }

EnsembleBlock EnsembleBlock::decode(std::span<const std::uint8_t> bytes) {
  Decoder dec(bytes);
  expect_tag(dec, kEnsembleBlock);
  EnsembleBlock eb;
  auto count = dec.u32();
  if (count > dec.remaining() / 32) throw DecodeError("implausible MiniBlock reference count");
  for (std::uint32_t i = 0; i < count; ++i) eb.miniblock_hashes.push_back(dec.digest());
  eb.metric_v = get_fraction(dec);
  eb.miner_id = dec.u32();
  eb.task_id = dec.digest();
  eb.timestamp = dec.u64();
  eb.height = dec.u64();
  if (!dec.done()) throw DecodeError("trailing bytes after EnsembleBlock");
  return eb;
}

std::vector<std::uint8_t> PayloadRecord::encode() const {
  Encoder enc;
  enc.u8(kPayload).u8(static_cast<std::uint8_t>(kind)).u32(payee).u64(amount);
  return enc.take();
}

std::vector<std::uint8_t> KeyBlock::encode_header() const {
  Encoder enc;
  enc.u8(kKeyBlock).u64(nonce).digest(merkle_root).u64(timestamp);
  put_fraction(enc, metric_best);
  enc.u32(static_cast<std::uint32_t>(eb_entries.size()));
  for (const auto& e : eb_entries) {
    enc.digest(e.ensemble);
    put_fraction(enc, e.metric_e);
  }
  enc.u32(miner_id).digest(task_id).u32(static_cast<std::uint32_t>(task_queue.size()));
  for (const auto& t : task_queue) enc.digest(t);
  enc.digest(prehash).u64(height);
  return enc.take();
}

HashDigest KeyBlock::digest() const { return canonical_hash(encode_header()); }

std::vector<std::uint8_t> KeyBlock::encode() const {
  Encoder enc;
  enc.bytes(encode_header()).u32(static_cast<std::uint32_t>(payload.size()));
  for (const auto& p : payload) enc.bytes(p.encode());
  return enc.take();
}

KeyBlock KeyBlock::decode(std::span<const std::uint8_t> bytes) {
  Decoder outer(bytes);
  auto header = outer.bytes();
  Decoder dec(header);
  expect_tag(dec, kKeyBlock);
  KeyBlock kb;
  kb.nonce = dec.u64();
  kb.merkle_root = dec.digest();
  kb.timestamp = dec.u64();
  kb.metric_best = get_fraction(dec);
  auto entries = dec.u32();
  if (entries > dec.remaining() / 48) throw DecodeError("implausible entry count");
  for (std::uint32_t i = 0; i < entries; ++i) {
    RankedEnsemble e;
    e.ensemble = dec.digest();
    e.metric_e = get_fraction(dec);
    kb.eb_entries.push_back(e);
  }
  kb.miner_id = dec.u32();
  kb.task_id = dec.digest();
  auto q = dec.u32();
  if (q > dec.remaining() / 32) throw DecodeError("implausible task queue length");
  for (std::uint32_t i = 0; i < q; ++i) kb.task_queue.push_back(dec.digest());
  kb.prehash = dec.digest();
  kb.height = dec.u64();
  if (!dec.done()) throw DecodeError("trailing bytes after KeyBlock header");

  auto records = outer.u32();
  for (std::uint32_t i = 0; i < records; ++i) {
    auto raw = outer.bytes();
    Decoder rd(raw);
    expect_tag(rd, kPayload);
    PayloadRecord p;
    p.kind = static_cast<PayloadKind>(rd.u8());
    p.payee = rd.u32();
    p.amount = rd.u64();
    if (!rd.done()) throw DecodeError("trailing bytes after payload record");
    kb.payload.push_back(p);
  }
  if (!outer.done()) throw DecodeError("trailing bytes after KeyBlock");
  return kb;
}

KeyBlock make_genesis(std::vector<HashDigest> initial_queue) {
  KeyBlock g;
  g.task_queue = std::move(initial_queue);
  g.height = 0;
  g.prehash = HashDigest::zero();
  g.merkle_root = HashDigest::zero();
  return g;
}

bool ranking_consistent(const KeyBlock& kb) {
  if (kb.eb_entries.empty()) return kb.metric_best.num == 0;
  for (std::size_t i = 1; i < kb.eb_entries.size(); ++i) {
    const auto& prev = kb.eb_entries[i - 1];
    const auto& cur = kb.eb_entries[i];
    if (prev.metric_e < cur.metric_e) return false;
    if (prev.metric_e == cur.metric_e && !(prev.ensemble < cur.ensemble)) return false;
  }
  for (const auto& e : kb.eb_entries)
    if (e.metric_e > kb.metric_best) return false;
  return kb.metric_best == kb.eb_entries.front().metric_e;
}

}  // namespace bagchain
