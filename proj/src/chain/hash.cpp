// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/hash.hpp"

#include <openssl/sha.h>

#include <stdexcept>

namespace bagchain {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

bool HashDigest::is_zero() const {
  for (auto b : bytes)
    if (b != 0) return false;
  return true;
}

std::string HashDigest::hex() const {
  std::string out(64, '0');
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = kHexDigits[bytes[i] >> 4];
    out[2 * i + 1] = kHexDigits[bytes[i] & 0x0f];
  }
  return out;
}

HashDigest HashDigest::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw std::invalid_argument("digest hex must be 64 characters");
  HashDigest d;
  for (std::size_t i = 0; i < 32; ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("digest hex contains a non-hex character");
    d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

HashDigest canonical_hash(std::span<const std::uint8_t> bytes) {
  HashDigest d;
  SHA256(bytes.data(), bytes.size(), d.bytes.data());
  return d;
}

HashDigest canonical_hash(std::string_view bytes) {
  return canonical_hash(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

HashDigest target_from_exponent(unsigned exponent) {
  if (exponent == 0 || exponent > 256) throw std::invalid_argument("target exponent must be in [1, 256]");
  HashDigest t;
  // Set the low `exponent` bits.
  for (unsigned bit = 0; bit < exponent; ++bit) {
    std::size_t byte = 31 - bit / 8;
    t.bytes[byte] |= static_cast<std::uint8_t>(1u << (bit % 8));
  }
  return t;
}

}  // namespace bagchain
