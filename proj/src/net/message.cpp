// SPDX-License-Identifier: Apache-2.0
#include "bagchain/net/message.hpp"

#include "bagchain/chain/encoding.hpp"

namespace bagchain::net {

namespace {
HashDigest fetch_digest(std::uint8_t tag, const HashDigest& model, MinerId owner, MinerId requester) {
  Encoder enc;
  enc.u8(tag).digest(model).u32(owner).u32(requester);
  return enc.hash();
}
}  // namespace

HashDigest DatasetPublication::digest() const {
  Encoder enc;
  enc.u8(0x44).u64(height).u8(static_cast<std::uint8_t>(kind)).u64(timestamp).digest(task_id).u32(requester_id);
  enc.digest(data ? ml::commitment(*data) : HashDigest::zero());
  return enc.hash();
}

HashDigest FetchRequest::digest() const { return fetch_digest(0x71, model_hash, owner, requester); }
HashDigest FetchResponse::digest() const { return fetch_digest(0x72, model_hash, owner, requester); }
HashDigest FetchDeferred::digest() const { return fetch_digest(0x73, model_hash, owner, requester); }

HashDigest payload_digest(const Payload& p) {
  return std::visit([](const auto& v) { return v.digest(); }, p);
}

}  // namespace bagchain::net
