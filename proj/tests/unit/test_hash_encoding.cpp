// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cstring>
#include <random>
#include <set>
#include <string>

#include "bagchain/chain/encoding.hpp"
#include "bagchain/chain/fraction.hpp"
#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/seed.hpp"

using namespace bagchain;

namespace {

// Straight-line FIPS 180-4 SHA-256, used only to cross-check the library.
std::array<std::uint8_t, 32> sha256_oracle(const std::vector<std::uint8_t>& msg) {
  static constexpr std::uint32_t k[64] = {
      0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
      0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
      0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
      0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
      0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
      0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
      0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
      0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  auto rotr = [](std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); };

  std::vector<std::uint8_t> m = msg;
  const std::uint64_t bits = static_cast<std::uint64_t>(msg.size()) * 8;
  m.push_back(0x80);
  while (m.size() % 64 != 56) m.push_back(0);
  for (int i = 7; i >= 0; --i) m.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));

  for (std::size_t off = 0; off < m.size(); off += 64) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t{m[off + 4 * i]} << 24) | (std::uint32_t{m[off + 4 * i + 1]} << 16) |
             (std::uint32_t{m[off + 4 * i + 2]} << 8) | std::uint32_t{m[off + 4 * i + 3]};
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t t1 = hh + (rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25)) + ((e & f) ^ (~e & g)) + k[i] + w[i];
      std::uint32_t t2 = (rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22)) + ((a & b) ^ (a & c) ^ (b & c));
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }
  std::array<std::uint8_t, 32> out{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j) out[4 * i + j] = static_cast<std::uint8_t>(h[i] >> (24 - 8 * j));
  return out;
}

}  // namespace

TEST_CASE("sha256 published vectors") {
  CHECK(canonical_hash(std::string_view("abc")).hex() ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(canonical_hash(std::string_view("")).hex() ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(canonical_hash(std::string_view("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")).hex() ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 agrees with the reference oracle on random inputs") {
  std::mt19937_64 rng(42);
  for (std::size_t len : {0u, 1u, 55u, 56u, 63u, 64u, 65u, 119u, 200u, 1000u}) {
    std::vector<std::uint8_t> msg(len);
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
    CHECK(canonical_hash(msg).bytes == sha256_oracle(msg));
  }
}

TEST_CASE("one-bit perturbation changes the digest") {
  std::vector<std::uint8_t> msg(64, 0x5a);
  auto base = canonical_hash(msg);
  for (std::size_t bit = 0; bit < msg.size() * 8; bit += 37) {
    auto m = msg;
    m[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK(canonical_hash(m) != base);
  }
  CHECK(canonical_hash(msg) == base);
}

TEST_CASE("digest hex round trip and ordering") {
  auto d = canonical_hash(std::string_view("x"));
  CHECK(HashDigest::from_hex(d.hex()) == d);
  CHECK_THROWS_AS(HashDigest::from_hex("zz"), std::invalid_argument);
  HashDigest a, b;
  a.bytes[0] = 1;
  b.bytes[31] = 0xff;
  CHECK(b < a);
  CHECK(HashDigest::zero().is_zero());
}

TEST_CASE("target from exponent is 2^e - 1") {
  auto t = target_from_exponent(244);
  // 2^244 - 1: top 12 bits clear, the remaining 244 set.
  CHECK(t.bytes[0] == 0x00);
  CHECK(t.bytes[1] == 0x0f);
  for (std::size_t i = 2; i < 32; ++i) CHECK(t.bytes[i] == 0xff);
  HashDigest just_below = t;
  CHECK(!meets_target(t, t));
  just_below.bytes[31] = 0xfe;
  CHECK(meets_target(just_below, t));
  HashDigest two_pow;
  two_pow.bytes[1] = 0x10;  // 2^244
  CHECK(!meets_target(two_pow, t));
  CHECK_THROWS(target_from_exponent(0));
  CHECK_THROWS(target_from_exponent(257));
  auto full = target_from_exponent(256);
  for (auto byte : full.bytes) CHECK(byte == 0xff);
}

TEST_CASE("encoder is big-endian and length-prefixed") {
  Encoder e;
  e.u8(0xab).u32(0x01020304).u64(0x0a0b0c0d0e0f1011ULL).str("hi");
  const std::vector<std::uint8_t> expect = {0xab, 1, 2, 3, 4, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e,
                                            0x0f, 0x10, 0x11, 0, 0, 0, 2, 'h', 'i'};
  CHECK(e.buffer() == expect);

  Encoder f;
  f.f64(1.0);
  const std::vector<std::uint8_t> one = {0x3f, 0xf0, 0, 0, 0, 0, 0, 0};
  CHECK(f.buffer() == one);

  Decoder d(e.buffer());
  CHECK(d.u8() == 0xab);
  CHECK(d.u32() == 0x01020304u);
  CHECK(d.u64() == 0x0a0b0c0d0e0f1011ULL);
  CHECK(d.str() == "hi");
  CHECK(d.done());
  CHECK_THROWS_AS(d.u8(), DecodeError);
}

TEST_CASE("decoder rejects oversized length prefixes") {
  std::vector<std::uint8_t> bad = {0xff, 0xff, 0xff, 0xff, 1};
  Decoder d(bad);
  CHECK_THROWS_AS(d.bytes(), DecodeError);
}

TEST_CASE("fraction compares by value and keeps its representation") {
  Fraction half{1, 2}, two_quarters{2, 4}, third{1, 3};
  CHECK(half == two_quarters);
  CHECK(!half.same_representation(two_quarters));
  CHECK(third < half);
  CHECK(Fraction{3, 4}.to_string() == "0.750000");
  CHECK(Fraction{2, 3}.to_string() == "0.666667");
  CHECK(Fraction{1, 1}.to_string() == "1.000000");
  CHECK(Fraction::parse("0.75") == Fraction{3, 4});
  CHECK(Fraction::parse("3/4").same_representation(Fraction{3, 4}));
  CHECK(Fraction::parse("1") == Fraction{1, 1});
  CHECK_THROWS(Fraction::parse("abc"));
  CHECK(Fraction{5, 4}.in_unit_interval() == false);
  // Huge operands compare without overflow.
  Fraction big_a{~0ULL - 1, ~0ULL}, big_b{~0ULL - 2, ~0ULL - 1};
  CHECK(big_b < big_a);
}

TEST_CASE("derived seeds are stable and label/index separated") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m)
    for (const char* label : {"dataset", "split", "bootstrap"})
      for (std::uint64_t i = 0; i < 8; ++i) seen.insert(derive_seed(m, label, {i}));
  CHECK(seen.size() == 4 * 3 * 8);
  CHECK(derive_seed(1, "x", {1, 2}) != derive_seed(1, "x", {2, 1}));
}
