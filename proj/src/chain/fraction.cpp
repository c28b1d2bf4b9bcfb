// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/fraction.hpp"

#include <charconv>

namespace bagchain {

std::string Fraction::to_string(int decimals) const {
  if (den == 0) return "nan";
  std::uint64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  // Round half up on the exact value.
  auto scaled = (static_cast<unsigned __int128>(num) * scale * 2 + den) / (static_cast<unsigned __int128>(den) * 2);
  auto whole = static_cast<std::uint64_t>(scaled / scale);
  auto frac = static_cast<std::uint64_t>(scaled % scale);
  std::string out = std::to_string(whole);
  if (decimals > 0) {
    std::string f = std::to_string(frac);
    out += '.';
    out += std::string(static_cast<std::size_t>(decimals) - f.size(), '0');
    out += f;
  }
  return out;
}

namespace {
std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("invalid fraction: '" + std::string(s) + "'");
  return v;
}
}  // namespace

Fraction Fraction::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Fraction f{parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1))};
    if (f.den == 0) throw std::invalid_argument("fraction with zero denominator");
    return f;
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return {parse_u64(text), 1};
  auto whole = text.substr(0, dot);
  auto frac = text.substr(dot + 1);
  if (frac.size() > 18) throw std::invalid_argument("too many decimals in fraction");
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::uint64_t w = whole.empty() ? 0 : parse_u64(whole);
  std::uint64_t f = frac.empty() ? 0 : parse_u64(frac);
  return {w * den + f, den};
}

}  // namespace bagchain
