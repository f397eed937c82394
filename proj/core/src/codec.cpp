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

#include "cdsedge/codec.hpp"

#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "text_util.hpp"

namespace cdsedge {
namespace {

using detail::parse_canonical_u64;
using detail::split;

constexpr std::string_view kHeaderBytewise = "#M bytewise";
constexpr std::string_view kHeaderBitwise = "#M bitwise";

[[noreturn]] void malformed(std::size_t line_number, const std::string& what) {
  throw MalformedCompactPayload("line " + std::to_string(line_number) + ": " + what);
}

std::uint32_t parse_u32_field(std::string_view text, std::size_t line_number, const char* name) {
  const auto value = parse_canonical_u64(text);
  if (!value || *value > std::numeric_limits<std::uint32_t>::max()) {
    malformed(line_number, std::string("bad ") + name + ": " + std::string(text));
  }
  return static_cast<std::uint32_t>(*value);
}

// `W.FFFF` with a canonical integral part; the only form the encoder emits.
// line_number 0 means direct API use, outside any payload.
void check_price_text(std::string_view text, std::size_t line_number) {
  const std::size_t dot = text.find('.');
  if (dot == std::string_view::npos || text.size() - dot - 1 != 4 ||
      !detail::all_digits(text.substr(dot + 1)) ||
      !parse_canonical_u64(text.substr(0, dot)) || dot > 12) {
    const std::string what = "bad price text: " + std::string(text);
    if (line_number == 0) {
      throw MalformedCompactPayload(what);
    }
    malformed(line_number, what);
  }
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(bytes.size() * 2);
  for (const std::uint8_t byte : bytes) {
    hex += kDigits[byte >> 4];
    hex += kDigits[byte & 0xf];
  }
  return hex;
}

std::vector<std::uint8_t> from_hex(std::string_view hex, std::size_t line_number) {
  if (hex.size() % 2 != 0) {
    malformed(line_number, "odd-length hex payload");
  }
  const auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    malformed(line_number, std::string("bad hex digit: ") + c);
  };
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
  }
  return bytes;
}

}  // namespace

std::size_t CompactBatch::entry_count() const {
  std::size_t count = 0;
  for (const CompactSegment& segment : segments) {
    count += segment.entries.size();
  }
  return count;
}

std::string price_text_from_micro(std::uint64_t price_micro) {
  if (price_micro % 100 != 0) {
    throw std::invalid_argument("price is not a multiple of 100 micro-units");
  }
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%llu.%04llu",
                static_cast<unsigned long long>(price_micro / 1'000'000),
                static_cast<unsigned long long>(price_micro / 100 % 10'000));
  return buffer;
}

std::uint64_t price_micro_from_text(std::string_view price_text) {
  check_price_text(price_text, 0);
  const std::size_t dot = price_text.find('.');
  const std::uint64_t whole = *parse_canonical_u64(price_text.substr(0, dot));
  const std::uint64_t fraction = *detail::parse_digits_u64(price_text.substr(dot + 1));
  return (whole * 10'000 + fraction) * 100;
}

FilteredRecord filter_fields(const SpotPriceRecord& record) {
  return FilteredRecord{price_text_from_micro(record.price_micro), record.timestamp_epoch,
                        record.key()};
}

CompactBatch encode_batch(std::span<const SpotPriceRecord> records, const Dictionary& dictionary,
                          const CodecConfig& cfg) {
  if (cfg.base_interval_seconds < 1) {
    throw std::invalid_argument("base_interval_seconds must be >= 1");
  }
  CompactBatch batch;
  batch.id_encoding = cfg.id_encoding;
  const bool bytewise = cfg.id_encoding == IdEncoding::Bytewise;

  std::vector<std::uint32_t> ids;
  ids.reserve(records.size());
  std::int64_t base = 0;
  std::int64_t previous = 0;
  bool open = false;
  for (const SpotPriceRecord& record : records) {
    if (open && record.timestamp_epoch < previous) {
      throw UnsortedInput("record at " + format_timestamp(record.timestamp_epoch) +
                          " arrives after " + format_timestamp(previous));
    }
    const std::uint32_t id = dictionary.lookup(record.key());
    if (!open || record.timestamp_epoch - base >= cfg.base_interval_seconds) {
      batch.segments.push_back(CompactSegment{record.timestamp_epoch, {}});
      base = record.timestamp_epoch;
      open = true;
    }
    batch.segments.back().entries.push_back(
        CompactEntry{price_text_from_micro(record.price_micro),
                     static_cast<std::uint32_t>(record.timestamp_epoch - base),
                     bytewise ? id : 0});
    ids.push_back(id);
    previous = record.timestamp_epoch;
  }

  if (!bytewise) {
    if (ids.empty()) {
      batch.code_table = HuffmanCodeTable{};
      batch.id_payload = BitVector{};
    } else {
      std::map<std::uint32_t, std::uint64_t> freqs;
      for (const std::uint32_t id : ids) {
        ++freqs[id];
      }
      batch.code_table = huffman_build(freqs);
      batch.id_payload = bitpack_ids(ids, *batch.code_table);
    }
  }
  return batch;
}

std::vector<SpotPriceRecord> decode_batch(const CompactBatch& batch,
                                          const Dictionary& dictionary) {
  const std::size_t count = batch.entry_count();
  std::vector<std::uint32_t> unpacked;
  if (batch.id_encoding == IdEncoding::BitwiseHuffman) {
    if (!batch.code_table || !batch.id_payload) {
      throw CorruptBitstream("bitwise batch lacks its code table or id payload");
    }
    unpacked = bitunpack_ids(*batch.id_payload, *batch.code_table, count);
  }

  std::vector<SpotPriceRecord> records;
  records.reserve(count);
  std::size_t index = 0;
  for (const CompactSegment& segment : batch.segments) {
    for (const CompactEntry& entry : segment.entries) {
      const std::uint32_t id =
          batch.id_encoding == IdEncoding::Bytewise ? entry.key_id : unpacked[index];
      ++index;
      const CompositeKey& key = dictionary.reverse(id);
      records.push_back(SpotPriceRecord{price_micro_from_text(entry.price_text),
                                        segment.base_epoch + entry.delta_seconds,
                                        key.instance_type, key.operating_system, key.zone});
    }
  }
  return records;
}

std::string serialize_compact(const CompactBatch& batch) {
  const bool bytewise = batch.id_encoding == IdEncoding::Bytewise;
  std::string out(bytewise ? kHeaderBytewise : kHeaderBitwise);
  out += '\n';
  for (const CompactSegment& segment : batch.segments) {
    out += "#B ";
    out += format_timestamp(segment.base_epoch);
    out += '\n';
    for (const CompactEntry& entry : segment.entries) {
      out += entry.price_text;
      out += ',';
      out += std::to_string(entry.delta_seconds);
      if (bytewise) {
        out += ',';
        out += std::to_string(entry.key_id);
      }
      out += '\n';
    }
  }
  if (!bytewise && batch.entry_count() > 0) {
    if (!batch.code_table || !batch.id_payload) {
      throw MalformedCompactPayload("bitwise batch lacks its code table or id payload");
    }
    out += "#T";
    for (const auto& [id, length] : batch.code_table->canonical_lengths()) {
      out += ' ';
      out += std::to_string(id);
      out += ':';
      out += std::to_string(length);
    }
    out += '\n';
    out += "#P ";
    out += to_hex(batch.id_payload->bytes());
    out += ' ';
    out += std::to_string(batch.id_payload->size());
    out += '\n';
  }
  return out;
}

CompactBatch parse_compact(std::string_view payload) {
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos < payload.size()) {
      const std::size_t newline = payload.find('\n', pos);
      if (newline == std::string_view::npos) {
        throw MalformedCompactPayload("payload does not end with a newline");
      }
      lines.push_back(payload.substr(pos, newline - pos));
      pos = newline + 1;
    }
  }
  if (lines.empty()) {
    throw MalformedCompactPayload("empty payload");
  }
  if (lines[0] != kHeaderBytewise && lines[0] != kHeaderBitwise) {
    throw MalformedCompactPayload("bad header line: " + std::string(lines[0]));
  }

  CompactBatch batch;
  const bool bytewise = lines[0] == kHeaderBytewise;
  batch.id_encoding = bytewise ? IdEncoding::Bytewise : IdEncoding::BitwiseHuffman;

  std::vector<std::pair<std::uint32_t, std::uint8_t>> table_lengths;
  std::vector<std::uint8_t> payload_bytes;
  std::size_t payload_bits = 0;
  bool saw_table = false;
  bool saw_payload = false;

  const auto close_segment = [&](std::size_t line_number) {
    if (!batch.segments.empty() && batch.segments.back().entries.empty()) {
      malformed(line_number, "segment has no entries");
    }
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_number = i + 1;
    if (line.find('\r') != std::string_view::npos) {
      malformed(line_number, "carriage return in payload");
    }
    if (line.rfind("#B ", 0) == 0) {
      if (saw_table || saw_payload) {
        malformed(line_number, "segment after the code table");
      }
      close_segment(line_number);
      std::int64_t base = 0;
      try {
        base = parse_timestamp(line.substr(3));
      } catch (const MalformedLine& e) {
        malformed(line_number, e.what());
      }
      if (!batch.segments.empty() && base <= batch.segments.back().base_epoch) {
        malformed(line_number, "base timestamps must strictly increase");
      }
      batch.segments.push_back(CompactSegment{base, {}});
    } else if (line == "#T" || line.rfind("#T ", 0) == 0) {
      if (bytewise) {
        malformed(line_number, "code table in a bytewise payload");
      }
      if (saw_table || saw_payload) {
        malformed(line_number, "duplicate code table");
      }
      close_segment(line_number);
      if (batch.entry_count() == 0) {
        malformed(line_number, "code table without entries");
      }
      saw_table = true;
      if (line.size() > 2) {
        for (const std::string_view pair : split(line.substr(3), ' ')) {
          const std::size_t colon = pair.find(':');
          if (colon == std::string_view::npos) {
            malformed(line_number, "bad id:length pair: " + std::string(pair));
          }
          const std::uint32_t id = parse_u32_field(pair.substr(0, colon), line_number, "id");
          const std::uint32_t length =
              parse_u32_field(pair.substr(colon + 1), line_number, "code length");
          if (length == 0 || length > 64) {
            malformed(line_number, "code length out of range: " + std::to_string(length));
          }
          table_lengths.emplace_back(id, static_cast<std::uint8_t>(length));
        }
      }
      if (table_lengths.empty()) {
        malformed(line_number, "empty code table");
      }
    } else if (line.rfind("#P ", 0) == 0) {
      if (bytewise) {
        malformed(line_number, "bit payload in a bytewise payload");
      }
      if (!saw_table || saw_payload) {
        malformed(line_number, saw_payload ? "duplicate bit payload" : "bit payload before code table");
      }
      saw_payload = true;
      const auto fields = split(line.substr(3), ' ');
      if (fields.size() != 2) {
        malformed(line_number, "expected '<hex> <bit length>'");
      }
      payload_bytes = from_hex(fields[0], line_number);
      const auto bits = parse_canonical_u64(fields[1]);
      if (!bits) {
        malformed(line_number, "bad bit length: " + std::string(fields[1]));
      }
      payload_bits = *bits;
    } else if (!line.empty() && line[0] == '#') {
      malformed(line_number, "unknown directive: " + std::string(line));
    } else {
      // entry line
      if (batch.segments.empty()) {
        malformed(line_number, "entry before any segment");
      }
      if (saw_table || saw_payload) {
        malformed(line_number, "entry after the code table");
      }
      const auto fields = split(line, ',');
      const std::size_t expected = bytewise ? 3 : 2;
      if (fields.size() != expected) {
        malformed(line_number, "expected " + std::to_string(expected) + " fields, got " +
                                   std::to_string(fields.size()));
      }
      check_price_text(fields[0], line_number);
      CompactEntry entry;
      entry.price_text = std::string(fields[0]);
      entry.delta_seconds = parse_u32_field(fields[1], line_number, "delta");
      if (bytewise) {
        entry.key_id = parse_u32_field(fields[2], line_number, "key id");
      }
      auto& entries = batch.segments.back().entries;
      if (!entries.empty() && entry.delta_seconds < entries.back().delta_seconds) {
        malformed(line_number, "deltas must be non-decreasing within a segment");
      }
      entries.push_back(std::move(entry));
    }
  }
  close_segment(lines.size());

  if (!bytewise) {
    const std::size_t entries = batch.entry_count();
    if (entries > 0 && (!saw_table || !saw_payload)) {
      throw MalformedCompactPayload("bitwise payload is missing its code table or bit payload");
    }
    try {
      batch.code_table = HuffmanCodeTable::from_lengths(std::move(table_lengths));
    } catch (const std::invalid_argument& e) {
      throw MalformedCompactPayload(std::string("bad code table: ") + e.what());
    }
    try {
      batch.id_payload = BitVector::from_bytes(std::move(payload_bytes), payload_bits);
    } catch (const CorruptBitstream& e) {
      throw MalformedCompactPayload(std::string("bad bit payload: ") + e.what());
    }
  }
  return batch;
}

}  // namespace cdsedge
