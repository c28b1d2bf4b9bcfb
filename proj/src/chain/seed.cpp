// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/seed.hpp"

#include "bagchain/chain/encoding.hpp"

namespace bagchain {

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::initializer_list<std::uint64_t> indices) {
  Encoder enc;
  enc.u64(master).str(label);
  for (auto i : indices) enc.u64(i);
  auto d = enc.hash();
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | d.bytes[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace bagchain
