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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdsedge/errors.hpp"

namespace cdsedge {

// Constant tag carried by every raw spot-price record.
inline constexpr std::string_view kRecordTag = "SPOTINSTANCEPRICE";

// Raw record file format: UTF-8, LF line endings, one record per line with
// six TAB-separated fields:
//   TAG  PRICE(6 fraction digits)  TIMESTAMP(YYYY-MM-DDTHH:MM:SS+0000)
//   INSTANCE_TYPE  OS  ZONE
inline constexpr char kFieldSeparator = '\t';

// (instance type, operating system, availability zone) triple identifying a
// unique service instance.
struct CompositeKey {
  std::string instance_type;
  std::string operating_system;
  std::string zone;

  auto operator<=>(const CompositeKey&) const = default;
};

// One parsed spot-price record. The constant tag is not stored: parse_record
// enforces it and render_record re-emits it.
struct SpotPriceRecord {
  std::uint64_t price_micro = 0;     // micro-currency units, always a multiple of 100
  std::int64_t timestamp_epoch = 0;  // seconds since the Unix epoch, UTC
  std::string instance_type;
  std::string operating_system;
  std::string zone;

  CompositeKey key() const { return {instance_type, operating_system, zone}; }

  bool operator==(const SpotPriceRecord&) const = default;
};

class MalformedLine : public Error {
public:
  using Error::Error;
};
class BadTag : public Error {
public:
  using Error::Error;
};
class BadPrice : public Error {
public:
  using Error::Error;
};
class BadOffset : public Error {
public:
  using Error::Error;
};

// Parses one raw record line (no trailing newline). Throws MalformedLine on
// any structural defect, BadTag when the tag differs from kRecordTag,
// BadPrice when the last two fraction digits are non-zero, and BadOffset
// when the UTC offset differs from "+0000".
SpotPriceRecord parse_record(std::string_view line);

// Renders a record back to its raw line form (no trailing newline). Exact
// inverse of parse_record for any valid record.
std::string render_record(const SpotPriceRecord& record);

// Parses an LF-separated block of record lines. Errors carry a
// "line <1-based number>: " prefix.
std::vector<SpotPriceRecord> parse_records_text(std::string_view text);

// Renders records as LF-terminated lines, one per record.
std::string render_records_text(const std::vector<SpotPriceRecord>& records);

// Epoch seconds <-> `YYYY-MM-DDTHH:MM:SS` (UTC, no offset suffix). Raw record
// timestamps append "+0000"; compact base timestamps use the bare form.
std::string format_timestamp(std::int64_t epoch_seconds);
std::int64_t parse_timestamp(std::string_view text);  // throws MalformedLine

// Configuration of the deterministic synthetic price-history generator.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::int64_t start_epoch = 1557273600;  // 2019-05-08T00:00:00Z
  std::uint32_t max_step_seconds = 120;
  std::vector<CompositeKey> key_universe;
  std::pair<std::uint64_t, std::uint64_t> price_range_micro{10'000, 2'500'000};

  static GeneratorConfig defaults();
};

// Built-in 96-key universe (8 instance types x 3 operating systems x 4 zones).
const std::vector<CompositeKey>& default_key_universe();

// Deterministic synthetic price history: n records with non-decreasing
// timestamps (consecutive gaps in [0, max_step_seconds]), keys drawn from the
// universe, prices multiples of 100 micro-units within the configured range.
// The same config always yields the same records.
std::vector<SpotPriceRecord> gen_records(std::size_t n, const GeneratorConfig& cfg);

}  // namespace cdsedge
