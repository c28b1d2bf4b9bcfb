// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bagchain {

/// Exact non-negative rational. Used for accuracies (correct / total) and
/// metric floors so every miner compares metrics bit-exactly.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  [[nodiscard]] double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  [[nodiscard]] bool in_unit_interval() const { return den != 0 && num <= den; }

  /// Value comparison (1/2 == 2/4). Use `same_representation` for encoding equality.
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    auto lhs = static_cast<unsigned __int128>(a.num) * b.den;
    auto rhs = static_cast<unsigned __int128>(b.num) * a.den;
    return lhs <=> rhs;
  }
  friend bool operator==(const Fraction& a, const Fraction& b) { return (a <=> b) == 0; }

  [[nodiscard]] bool same_representation(const Fraction& o) const { return num == o.num && den == o.den; }

  /// Fixed six-decimal rendering computed from the integers (byte-stable).
  [[nodiscard]] std::string to_string(int decimals = 6) const;

  /// Parses "0.75", "1", "3/4". Decimals map to a power-of-ten denominator.
  static Fraction parse(std::string_view text);
};

}  // namespace bagchain
