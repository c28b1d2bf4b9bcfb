// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace bagchain {

/// 256-bit opaque digest. Ordering is lexicographic over the bytes, which is
/// the same as comparing the digests as big-endian unsigned integers.
struct HashDigest {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const HashDigest&) const = default;
  bool operator==(const HashDigest&) const = default;

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] std::string hex() const;
  [[nodiscard]] std::string short_hex() const { return hex().substr(0, 12); }

  static HashDigest zero() { return {}; }
  /// Throws std::invalid_argument on anything but 64 hex characters.
  static HashDigest from_hex(std::string_view hex);
};

/// SHA-256 over an arbitrary byte string.
HashDigest canonical_hash(std::span<const std::uint8_t> bytes);
HashDigest canonical_hash(std::string_view bytes);

/// 2^exponent - 1 as a 256-bit big-endian threshold (exponent in [1, 256]).
HashDigest target_from_exponent(unsigned exponent);

/// PoW gate: digest < target.
inline bool meets_target(const HashDigest& digest, const HashDigest& target) {
  return digest < target;
}

struct HashDigestHasher {
  std::size_t operator()(const HashDigest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

}  // namespace bagchain
