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

#include "cdsedge/huffman.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace cdsedge {

void BitVector::append_bit(bool bit) {
  if (length_bits_ % 8 == 0) {
    bytes_.push_back(0);
  }
  if (bit) {
    bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (length_bits_ % 8));
  }
  ++length_bits_;
}

void BitVector::append_bits(std::uint64_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) {
    append_bit((value >> i) & 1u);
  }
}

bool BitVector::bit(std::size_t index) const {
  assert(index < length_bits_);
  return (bytes_[index / 8] >> (7 - index % 8)) & 1u;
}

BitVector BitVector::from_bytes(std::vector<std::uint8_t> bytes, std::size_t length_bits) {
  const std::size_t expected_bytes = (length_bits + 7) / 8;
  if (bytes.size() != expected_bytes) {
    throw CorruptBitstream("bit length " + std::to_string(length_bits) + " does not match " +
                           std::to_string(bytes.size()) + " bytes");
  }
  if (length_bits % 8 != 0 && (bytes.back() & (0xffu >> (length_bits % 8))) != 0) {
    throw CorruptBitstream("nonzero padding bits");
  }
  BitVector vector;
  vector.bytes_ = std::move(bytes);
  vector.length_bits_ = length_bits;
  return vector;
}

void HuffmanCodeTable::assign_canonical(
    std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths) {
  std::sort(lengths.begin(), lengths.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  codes_.clear();
  groups_.clear();
  std::uint64_t code = 0;
  std::uint8_t previous_length = 0;
  for (const auto& [id, length] : lengths) {
    if (previous_length != 0) {
      code = (code + 1) << (length - previous_length);
    }
    codes_[id] = HuffmanCode{code, length};
    if (groups_.empty() || groups_.back().length != length) {
      groups_.push_back(LengthGroup{length, code, {}});
    }
    groups_.back().symbols.push_back(id);
    previous_length = length;
  }
}

HuffmanCodeTable HuffmanCodeTable::from_lengths(
    std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths) {
  std::unordered_set<std::uint32_t> seen;
  unsigned __int128 kraft = 0;  // scaled by 2^64
  for (const auto& [id, length] : lengths) {
    if (length == 0 || length > 64) {
      throw std::invalid_argument("code length out of range for id " + std::to_string(id));
    }
    if (!seen.insert(id).second) {
      throw std::invalid_argument("duplicate symbol id " + std::to_string(id));
    }
    kraft += static_cast<unsigned __int128>(1) << (64 - length);
  }
  if (kraft > static_cast<unsigned __int128>(1) << 64) {
    throw std::invalid_argument("code lengths violate the Kraft inequality");
  }
  HuffmanCodeTable table;
  table.assign_canonical(std::move(lengths));
  return table;
}

const HuffmanCode& HuffmanCodeTable::code_for(std::uint32_t id) const {
  const auto it = codes_.find(id);
  if (it == codes_.end()) {
    throw MissingCode("no code for id " + std::to_string(id));
  }
  return it->second;
}

bool HuffmanCodeTable::contains(std::uint32_t id) const { return codes_.count(id) != 0; }

std::vector<std::pair<std::uint32_t, std::uint8_t>> HuffmanCodeTable::canonical_lengths() const {
  std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths;
  lengths.reserve(codes_.size());
  for (const LengthGroup& group : groups_) {
    for (const std::uint32_t id : group.symbols) {
      lengths.emplace_back(id, group.length);
    }
  }
  return lengths;
}

std::vector<std::uint32_t> HuffmanCodeTable::decode(const BitVector& bits,
                                                    std::size_t count) const {
  std::vector<std::uint32_t> out;
  out.reserve(count);
  const std::uint8_t max_length = groups_.empty() ? 0 : groups_.back().length;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t code = 0;
    std::uint8_t length = 0;
    std::size_t group_index = 0;
    while (true) {
      if (length == max_length) {
        throw CorruptBitstream("bitstream contains an invalid code");
      }
      if (pos == bits.size()) {
        throw CorruptBitstream("bitstream exhausted after " + std::to_string(i) + " of " +
                               std::to_string(count) + " symbols");
      }
      code = (code << 1) | (bits.bit(pos++) ? 1u : 0u);
      ++length;
      while (group_index < groups_.size() && groups_[group_index].length < length) {
        ++group_index;
      }
      if (group_index < groups_.size() && groups_[group_index].length == length &&
          code >= groups_[group_index].first_code &&
          code - groups_[group_index].first_code < groups_[group_index].symbols.size()) {
        out.push_back(groups_[group_index].symbols[code - groups_[group_index].first_code]);
        break;
      }
    }
  }
  if (pos != bits.size()) {
    throw CorruptBitstream(std::to_string(bits.size() - pos) + " trailing bits after " +
                           std::to_string(count) + " symbols");
  }
  return out;
}

HuffmanCodeTable huffman_build(const std::map<std::uint32_t, std::uint64_t>& freqs) {
  if (freqs.empty()) {
    throw EmptyFrequencyMap("no symbols to encode");
  }
  for (const auto& [id, count] : freqs) {
    if (count == 0) {
      throw std::invalid_argument("zero frequency for id " + std::to_string(id));
    }
  }

  std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths;
  lengths.reserve(freqs.size());
  if (freqs.size() == 1) {
    lengths.emplace_back(freqs.begin()->first, 1);
  } else {
    struct Node {
      std::uint64_t count;
      int left;
      int right;
    };
    std::vector<Node> nodes;
    std::vector<std::uint32_t> leaf_ids;
    nodes.reserve(freqs.size() * 2);
    for (const auto& [id, count] : freqs) {
      leaf_ids.push_back(id);
      nodes.push_back({count, -1, -1});
    }
    // Min-heap on (count, creation index): the tie-break makes the produced
    // length assignment deterministic; canonicalization then fixes the codes.
    const auto greater = [&nodes](int a, int b) {
      return nodes[a].count != nodes[b].count ? nodes[a].count > nodes[b].count : a > b;
    };
    std::priority_queue<int, std::vector<int>, decltype(greater)> heap(greater);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      heap.push(i);
    }
    while (heap.size() > 1) {
      const int a = heap.top();
      heap.pop();
      const int b = heap.top();
      heap.pop();
      nodes.push_back({nodes[a].count + nodes[b].count, a, b});
      heap.push(static_cast<int>(nodes.size()) - 1);
    }

    const int leaf_count = static_cast<int>(leaf_ids.size());
    std::vector<std::pair<int, unsigned>> stack{{static_cast<int>(nodes.size()) - 1, 0}};
    while (!stack.empty()) {
      const auto [index, depth] = stack.back();
      stack.pop_back();
      if (index < leaf_count) {
        if (depth > 64) {
          throw Error("huffman code length exceeds 64 bits");
        }
        lengths.emplace_back(leaf_ids[index], static_cast<std::uint8_t>(depth));
      } else {
        stack.emplace_back(nodes[index].left, depth + 1);
        stack.emplace_back(nodes[index].right, depth + 1);
      }
    }
  }

  HuffmanCodeTable table;
  table.assign_canonical(std::move(lengths));
  return table;
}

BitVector bitpack_ids(std::span<const std::uint32_t> ids, const HuffmanCodeTable& table) {
  BitVector bits;
  for (const std::uint32_t id : ids) {
    const HuffmanCode& code = table.code_for(id);
    bits.append_bits(code.bits, code.length);
  }
  return bits;
}

std::vector<std::uint32_t> bitunpack_ids(const BitVector& bits, const HuffmanCodeTable& table,
                                         std::size_t count) {
  return table.decode(bits, count);
}

}  // namespace cdsedge
