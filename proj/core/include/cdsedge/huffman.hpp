// Copyright 2026 The cdsedge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cdsedge/errors.hpp"

namespace cdsedge {

class EmptyFrequencyMap : public Error {
public:
  using Error::Error;
};
class MissingCode : public Error {
public:
  using Error::Error;
};
class CorruptBitstream : public Error {
public:
  using Error::Error;
};

// Packed bit sequence, MSB-first within each byte. Trailing pad bits of the
// last byte are always zero.
class BitVector {
public:
  BitVector() = default;

  void append_bit(bool bit);
  // Appends the low `count` bits of `value`, most significant first.
  void append_bits(std::uint64_t value, unsigned count);

  bool bit(std::size_t index) const;
  std::size_t size() const noexcept { return length_bits_; }
  bool empty() const noexcept { return length_bits_ == 0; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  // Reassembles a vector from its packed form. Throws CorruptBitstream when
  // the byte count does not match the bit length or a pad bit is set.
  static BitVector from_bytes(std::vector<std::uint8_t> bytes, std::size_t length_bits);

  bool operator==(const BitVector&) const = default;

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t length_bits_ = 0;
};

// One prefix code: the low `length` bits of `bits`, most significant first.
struct HuffmanCode {
  std::uint64_t bits = 0;
  std::uint8_t length = 0;

  bool operator==(const HuffmanCode&) const = default;
};

// Canonical prefix-free code table over 32-bit symbol ids. Codes are assigned
// in (length, id) order, so independently built tables agree bit-for-bit.
class HuffmanCodeTable {
public:
  HuffmanCodeTable() = default;  // empty table, decodes nothing

  // Rebuilds the canonical table from (id, code length) pairs, e.g. parsed
  // from a serialized batch. Throws std::invalid_argument on a duplicate id,
  // a zero or oversized length, or a Kraft sum above one.
  static HuffmanCodeTable from_lengths(std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths);

  const HuffmanCode& code_for(std::uint32_t id) const;  // MissingCode
  bool contains(std::uint32_t id) const;
  std::size_t symbol_count() const noexcept { return codes_.size(); }
  bool empty() const noexcept { return codes_.empty(); }

  // (id, length) pairs in canonical (length, id) order.
  std::vector<std::pair<std::uint32_t, std::uint8_t>> canonical_lengths() const;

  // Decodes exactly `count` symbols; the vector must be consumed to its last
  // bit. Throws CorruptBitstream otherwise.
  std::vector<std::uint32_t> decode(const BitVector& bits, std::size_t count) const;

  bool operator==(const HuffmanCodeTable& other) const { return codes_ == other.codes_; }

private:
  void assign_canonical(std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths);

  struct LengthGroup {
    std::uint8_t length = 0;
    std::uint64_t first_code = 0;
    std::vector<std::uint32_t> symbols;  // ascending id
  };

  std::map<std::uint32_t, HuffmanCode> codes_;
  std::vector<LengthGroup> groups_;  // ascending length

  friend HuffmanCodeTable huffman_build(const std::map<std::uint32_t, std::uint64_t>& freqs);
};

// Optimal prefix-free code lengths for the given positive frequencies,
// canonicalized. A single-symbol alphabet gets the 1-bit code "0" so no code
// is ever empty. Throws EmptyFrequencyMap when there are no symbols.
HuffmanCodeTable huffman_build(const std::map<std::uint32_t, std::uint64_t>& freqs);

// Concatenates the codes of `ids` in order. Throws MissingCode.
BitVector bitpack_ids(std::span<const std::uint32_t> ids, const HuffmanCodeTable& table);

// Inverse of bitpack_ids for a known symbol count. Throws CorruptBitstream
// when the stream ends mid-code, contains an invalid code, or does not decode
// to exactly `count` symbols.
std::vector<std::uint32_t> bitunpack_ids(const BitVector& bits, const HuffmanCodeTable& table,
                                         std::size_t count);

}  // namespace cdsedge
