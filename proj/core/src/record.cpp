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

#include "cdsedge/record.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "text_util.hpp"

namespace cdsedge {
namespace {

using detail::all_digits;
using detail::parse_canonical_u64;
using detail::split;

// Proleptic Gregorian calendar <-> day count, days relative to 1970-01-01.
std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day) {
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const auto yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, std::int64_t& year, unsigned& month, unsigned& day) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const auto doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  year = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp < 10 ? mp + 3 : mp - 9;
  year += month <= 2;
}

bool is_leap(std::int64_t year) {
  return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

unsigned last_day_of_month(std::int64_t year, unsigned month) {
  static constexpr std::array<unsigned, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (month == 2 && is_leap(year)) ? 29u : kDays[month - 1];
}

unsigned two_digits(std::string_view text, std::size_t offset) {
  return static_cast<unsigned>(text[offset] - '0') * 10 +
         static_cast<unsigned>(text[offset + 1] - '0');
}

std::uint64_t parse_price(std::string_view text) {
  const std::size_t dot = text.find('.');
  if (dot == std::string_view::npos) {
    throw MalformedLine("price has no decimal point: " + std::string(text));
  }
  const std::string_view whole = text.substr(0, dot);
  const std::string_view fraction = text.substr(dot + 1);
  if (fraction.size() != 6 || !all_digits(fraction)) {
    throw MalformedLine("price must have exactly 6 fraction digits: " + std::string(text));
  }
  const auto whole_value = parse_canonical_u64(whole);
  if (!whole_value || whole.size() > 12) {
    throw MalformedLine("bad price integral part: " + std::string(text));
  }
  if (fraction[4] != '0' || fraction[5] != '0') {
    throw BadPrice("last two price digits must be zero: " + std::string(text));
  }
  return *whole_value * 1'000'000 + *detail::parse_digits_u64(fraction);
}

std::string format_price(std::uint64_t price_micro) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%llu.%06llu",
                static_cast<unsigned long long>(price_micro / 1'000'000),
                static_cast<unsigned long long>(price_micro % 1'000'000));
  return buffer;
}

void check_token(std::string_view token, const char* field_name) {
  if (token.empty()) {
    throw MalformedLine(std::string("empty ") + field_name + " field");
  }
  for (const char c : token) {
    if (c == '\n' || c == '\r' || c == kFieldSeparator) {
      throw MalformedLine(std::string(field_name) + " field contains a separator character");
    }
  }
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS
  const bool shape_ok =
      text.size() == 19 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
      text[13] == ':' && text[16] == ':' && all_digits(text.substr(0, 4)) &&
      all_digits(text.substr(5, 2)) && all_digits(text.substr(8, 2)) &&
      all_digits(text.substr(11, 2)) && all_digits(text.substr(14, 2)) &&
      all_digits(text.substr(17, 2));
  if (!shape_ok) {
    throw MalformedLine("bad timestamp: " + std::string(text));
  }
  const auto year = static_cast<std::int64_t>(*detail::parse_digits_u64(text.substr(0, 4)));
  const unsigned month = two_digits(text, 5);
  const unsigned day = two_digits(text, 8);
  const unsigned hour = two_digits(text, 11);
  const unsigned minute = two_digits(text, 14);
  const unsigned second = two_digits(text, 17);
  if (month < 1 || month > 12 || day < 1 || day > last_day_of_month(year, month) || hour > 23 ||
      minute > 59 || second > 59) {
    throw MalformedLine("timestamp out of range: " + std::string(text));
  }
  const std::int64_t epoch =
      days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
  if (epoch < 0) {
    throw MalformedLine("timestamp precedes the Unix epoch: " + std::string(text));
  }
  return epoch;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  if (epoch_seconds < 0) {
    throw std::invalid_argument("negative epoch timestamp");
  }
  const std::int64_t days = epoch_seconds / 86400;
  const std::int64_t rest = epoch_seconds % 86400;
  std::int64_t year = 0;
  unsigned month = 0;
  unsigned day = 0;
  civil_from_days(days, year, month, day);
  if (year > 9999) {
    throw std::invalid_argument("timestamp beyond year 9999");
  }
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                static_cast<long long>(year), month, day, static_cast<long long>(rest / 3600),
                static_cast<long long>(rest / 60 % 60), static_cast<long long>(rest % 60));
  return buffer;
}

SpotPriceRecord parse_record(std::string_view line) {
  const auto fields = split(line, kFieldSeparator);
  if (fields.size() != 6) {
    throw MalformedLine("expected 6 fields, got " + std::to_string(fields.size()));
  }
  if (fields[0] != kRecordTag) {
    throw BadTag("unexpected record tag: " + std::string(fields[0]));
  }
  const std::uint64_t price_micro = parse_price(fields[1]);

  const std::string_view stamp = fields[2];
  if (stamp.size() != 24) {
    throw MalformedLine("timestamp must be 24 characters: " + std::string(stamp));
  }
  if (stamp.substr(19) != "+0000") {
    throw BadOffset("UTC offset must be +0000: " + std::string(stamp.substr(19)));
  }
  const std::int64_t epoch = parse_timestamp(stamp.substr(0, 19));

  check_token(fields[3], "instance type");
  check_token(fields[4], "operating system");
  check_token(fields[5], "zone");

  return SpotPriceRecord{price_micro, epoch, std::string(fields[3]), std::string(fields[4]),
                         std::string(fields[5])};
}

std::string render_record(const SpotPriceRecord& record) {
  std::string line;
  line.reserve(64 + record.instance_type.size() + record.operating_system.size() +
               record.zone.size());
  line += kRecordTag;
  line += kFieldSeparator;
  line += format_price(record.price_micro);
  line += kFieldSeparator;
  line += format_timestamp(record.timestamp_epoch);
  line += "+0000";
  line += kFieldSeparator;
  line += record.instance_type;
  line += kFieldSeparator;
  line += record.operating_system;
  line += kFieldSeparator;
  line += record.zone;
  return line;
}

namespace {

template <typename E>
[[noreturn]] void rethrow_with_line(const E& error, std::size_t line_number) {
  throw E("line " + std::to_string(line_number) + ": " + error.what());
}

}  // namespace

std::vector<SpotPriceRecord> parse_records_text(std::string_view text) {
  std::vector<SpotPriceRecord> records;
  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos < text.size()) {
    const std::size_t newline = text.find('\n', pos);
    const std::size_t end = newline == std::string_view::npos ? text.size() : newline;
    const std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    try {
      records.push_back(parse_record(line));
    } catch (const BadTag& e) {
      rethrow_with_line(e, line_number);
    } catch (const BadPrice& e) {
      rethrow_with_line(e, line_number);
    } catch (const BadOffset& e) {
      rethrow_with_line(e, line_number);
    } catch (const MalformedLine& e) {
      rethrow_with_line(e, line_number);
    }
    pos = newline == std::string_view::npos ? text.size() : newline + 1;
  }
  return records;
}

std::string render_records_text(const std::vector<SpotPriceRecord>& records) {
  std::string text;
  for (const auto& record : records) {
    text += render_record(record);
    text += '\n';
  }
  return text;
}

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig cfg;
  cfg.key_universe = default_key_universe();
  return cfg;
}

const std::vector<CompositeKey>& default_key_universe() {
  static const std::vector<CompositeKey> universe = [] {
    const std::array<const char*, 8> types{"m3.large",  "m3.xlarge", "m4.large", "c4.xlarge",
                                           "c5.large",  "r4.xlarge", "t2.micro", "i3.large"};
    const std::array<const char*, 3> systems{"Linux/UNIX", "Windows", "SUSE Linux"};
    const std::array<const char*, 4> zones{"us-east-1a", "us-east-1b", "us-west-2a", "eu-west-1c"};
    std::vector<CompositeKey> keys;
    keys.reserve(types.size() * systems.size() * zones.size());
    for (const char* type : types) {
      for (const char* os : systems) {
        for (const char* zone : zones) {
          keys.push_back({type, os, zone});
        }
      }
    }
    return keys;
  }();
  return universe;
}

std::vector<SpotPriceRecord> gen_records(std::size_t n, const GeneratorConfig& cfg) {
  const auto [price_min, price_max] = cfg.price_range_micro;
  if (cfg.key_universe.empty()) {
    throw std::invalid_argument("generator key universe is empty");
  }
  if (cfg.max_step_seconds < 1) {
    throw std::invalid_argument("max_step_seconds must be >= 1");
  }
  if (price_min > price_max || price_min % 100 != 0 || price_max % 100 != 0) {
    throw std::invalid_argument("bad price range");
  }

  std::mt19937_64 rng(cfg.seed);
  // mt19937_64 output is pinned by the standard; the modulo keeps the stream
  // identical across platforms, which distributions would not.
  const auto bounded = [&rng](std::uint64_t bound) { return rng() % bound; };

  std::vector<SpotPriceRecord> records;
  records.reserve(n);
  std::int64_t timestamp = cfg.start_epoch;
  const std::uint64_t price_steps = (price_max - price_min) / 100 + 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      timestamp += static_cast<std::int64_t>(bounded(cfg.max_step_seconds + 1ull));
    }
    const CompositeKey& key = cfg.key_universe[bounded(cfg.key_universe.size())];
    const std::uint64_t price = price_min + 100 * bounded(price_steps);
    records.push_back({price, timestamp, key.instance_type, key.operating_system, key.zone});
  }
  return records;
}

}  // namespace cdsedge
