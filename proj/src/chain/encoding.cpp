// SPDX-License-Identifier: Apache-2.0
#include "bagchain/chain/encoding.hpp"

#include <bit>
#include <limits>

namespace bagchain {

Encoder& Encoder::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Encoder& Encoder::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Encoder& Encoder::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

Encoder& Encoder::digest(const HashDigest& d) {
  buf_.insert(buf_.end(), d.bytes.begin(), d.bytes.end());
  return *this;
}

Encoder& Encoder::bytes(std::span<const std::uint8_t> b) {
  if (b.size() > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("field too long to encode");
  u32(static_cast<std::uint32_t>(b.size()));
  return raw(b);
}

Encoder& Encoder::raw(std::span<const std::uint8_t> b) {
  buf_.insert(buf_.end(), b.begin(), b.end());
  return *this;
}

Encoder& Encoder::str(std::string_view s) {
  return bytes(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void Decoder::need(std::size_t n) const {
  if (data_.size() - pos_ < n) throw DecodeError("truncated encoding");
}

std::uint8_t Decoder::u8() {
  need(1);
  return data_[pos_++];
}

std::uint32_t Decoder::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::uint64_t Decoder::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

double Decoder::f64() { return std::bit_cast<double>(u64()); }

HashDigest Decoder::digest() {
  need(32);
  HashDigest d;
  for (auto& b : d.bytes) b = data_[pos_++];
  return d;
}

std::vector<std::uint8_t> Decoder::bytes() {
  auto n = u32();
  need(n);
  std::vector<std::uint8_t> out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

std::string Decoder::str() {
  auto b = bytes();
  return {b.begin(), b.end()};
}

}  // namespace bagchain
