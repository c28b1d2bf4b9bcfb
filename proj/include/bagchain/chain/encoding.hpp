// SPDX-License-Identifier: Apache-2.0
#pragma once

// Canonical byte encoding: fields in declaration order, integers big-endian
// fixed width, doubles as their IEEE-754 bit pattern, variable-length data
// prefixed with a u32 length.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bagchain/chain/hash.hpp"

namespace bagchain {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Encoder {
 public:
  Encoder& u8(std::uint8_t v) {
    buf_.push_back(v);
    return *this;
  }
  Encoder& u32(std::uint32_t v);
  Encoder& u64(std::uint64_t v);
  Encoder& f64(double v);
  Encoder& digest(const HashDigest& d);
  Encoder& bytes(std::span<const std::uint8_t> b);  // length-prefixed
  Encoder& raw(std::span<const std::uint8_t> b);    // no prefix
  Encoder& str(std::string_view s);

  [[nodiscard]] const std::vector<std::uint8_t>& buffer() const { return buf_; }
  [[nodiscard]] std::vector<std::uint8_t> take() { return std::move(buf_); }
  [[nodiscard]] std::size_t size() const { return buf_.size(); }
  [[nodiscard]] HashDigest hash() const { return canonical_hash(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  HashDigest digest();
  std::vector<std::uint8_t> bytes();
  std::string str();

  [[nodiscard]] bool done() const { return pos_ == data_.size(); }
  [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace bagchain
