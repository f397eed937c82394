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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdsedge/dictionary.hpp"
#include "cdsedge/errors.hpp"
#include "cdsedge/huffman.hpp"
#include "cdsedge/record.hpp"

namespace cdsedge {

// Bytewise keeps one integer id per entry (fast); BitwiseHuffman bit-packs the
// id stream with canonical prefix codes (small).
enum class IdEncoding { Bytewise, BitwiseHuffman };

struct CodecConfig {
  // A new base timestamp opens once a delta would reach this bound, so every
  // stored delta stays in [0, base_interval_seconds).
  std::uint32_t base_interval_seconds = 86400;
  IdEncoding id_encoding = IdEncoding::Bytewise;
};

class UnsortedInput : public Error {
public:
  using Error::Error;
};
class MalformedCompactPayload : public Error {
public:
  using Error::Error;
};

struct CompactEntry {
  std::string price_text;        // exactly 4 fraction digits
  std::uint32_t delta_seconds = 0;
  std::uint32_t key_id = 0;      // 0 and unused when ids ride in the bit payload

  bool operator==(const CompactEntry&) const = default;
};

struct CompactSegment {
  std::int64_t base_epoch = 0;
  std::vector<CompactEntry> entries;

  bool operator==(const CompactSegment&) const = default;
};

// Encoded form of a record sequence. Segment bases are strictly increasing;
// within a segment base + delta is non-decreasing; total entry count equals
// the source record count. code_table/id_payload are present exactly when
// id_encoding is BitwiseHuffman.
struct CompactBatch {
  IdEncoding id_encoding = IdEncoding::Bytewise;
  std::vector<CompactSegment> segments;
  std::optional<HuffmanCodeTable> code_table;
  std::optional<BitVector> id_payload;

  std::size_t entry_count() const;

  bool operator==(const CompactBatch&) const = default;
};

// What survives the redundancy filter: the constant tag is dropped, the two
// always-zero trailing price digits are dropped, the "+0000" offset is
// dropped.
struct FilteredRecord {
  std::string price_text;        // 4 fraction digits
  std::int64_t timestamp_epoch = 0;
  CompositeKey key;

  bool operator==(const FilteredRecord&) const = default;
};

FilteredRecord filter_fields(const SpotPriceRecord& record);

// Price text with 4 fraction digits <-> micro-units, exact in both directions.
std::string price_text_from_micro(std::uint64_t price_micro);
std::uint64_t price_micro_from_text(std::string_view price_text);  // MalformedCompactPayload

// Encodes timestamp-sorted records against the dictionary. Throws
// UnsortedInput when timestamps regress and propagates UnknownKey.
CompactBatch encode_batch(std::span<const SpotPriceRecord> records, const Dictionary& dictionary,
                          const CodecConfig& cfg);

// Exact inverse of encode_batch: re-materializes the constant tag and the
// trailing price zeros. Throws UnknownId and CorruptBitstream.
std::vector<SpotPriceRecord> decode_batch(const CompactBatch& batch,
                                          const Dictionary& dictionary);

// Compact text serialization, UTF-8 with LF endings:
//   #M bytewise|bitwise                      header
//   #B <YYYY-MM-DDTHH:MM:SS>                 opens a segment
//   <price_text>,<delta_seconds>[,<key_id>]  one entry (key_id in bytewise mode only)
//   #T <id>:<code_length> ...                bitwise only, canonical order
//   #P <hex bytes> <bit length>              bitwise only, packed id stream
std::string serialize_compact(const CompactBatch& batch);
CompactBatch parse_compact(std::string_view payload);  // MalformedCompactPayload

}  // namespace cdsedge
