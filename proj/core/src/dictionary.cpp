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

#include "cdsedge/dictionary.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "text_util.hpp"

namespace cdsedge {
namespace {

std::size_t combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

std::string describe(const CompositeKey& key) {
  return key.instance_type + " / " + key.operating_system + " / " + key.zone;
}

}  // namespace

std::size_t CompositeKeyHash::operator()(const CompositeKey& key) const noexcept {
  const std::hash<std::string> h;
  std::size_t seed = h(key.instance_type);
  seed = combine(seed, h(key.operating_system));
  seed = combine(seed, h(key.zone));
  return seed;
}

bool Dictionary::insert(CompositeKey key) {
  const auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(entries_.size()));
  if (inserted) {
    entries_.push_back(std::move(key));
  }
  return inserted;
}

Dictionary Dictionary::build(const std::vector<CompositeKey>& keys) {
  if (keys.empty()) {
    throw EmptyKeySet("cannot build a dictionary from an empty key set");
  }
  Dictionary dictionary;
  dictionary.entries_.reserve(keys.size());
  for (const CompositeKey& key : keys) {
    dictionary.insert(key);
  }
  return dictionary;
}

std::uint32_t Dictionary::lookup(const CompositeKey& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) {
    throw UnknownKey("unknown composite key: " + describe(key));
  }
  return it->second;
}

const CompositeKey& Dictionary::reverse(std::uint32_t id) const {
  if (id >= entries_.size()) {
    throw UnknownId("unknown id " + std::to_string(id) + " (dictionary has " +
                    std::to_string(entries_.size()) + " entries)");
  }
  return entries_[id];
}

bool Dictionary::contains(const CompositeKey& key) const {
  return index_.find(key) != index_.end();
}

void Dictionary::save(std::ostream& out) const {
  for (const CompositeKey& key : entries_) {
    out << key.instance_type << kFieldSeparator << key.operating_system << kFieldSeparator
        << key.zone << '\n';
  }
}

std::size_t Dictionary::save_file(const std::filesystem::path& destination) const {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) {
    throw IoFailure("cannot open dictionary file for writing: " + destination.string());
  }
  save(out);
  out.flush();
  if (!out.good()) {
    throw IoFailure("failed writing dictionary file: " + destination.string());
  }
  const auto bytes = out.tellp();
  return bytes < 0 ? 0 : static_cast<std::size_t>(bytes);
}

Dictionary Dictionary::load(std::istream& in) {
  Dictionary dictionary;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = detail::split(line, kFieldSeparator);
    if (fields.size() != 3) {
      throw MalformedDictionaryFile("line " + std::to_string(line_number) + ": expected 3 fields, got " +
                                    std::to_string(fields.size()));
    }
    for (const auto field : fields) {
      if (field.empty() || field.find('\r') != std::string_view::npos) {
        throw MalformedDictionaryFile("line " + std::to_string(line_number) + ": bad field");
      }
    }
    CompositeKey key{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
    if (!dictionary.insert(std::move(key))) {
      throw MalformedDictionaryFile("line " + std::to_string(line_number) + ": duplicate key " +
                                    std::string(fields[0]) + " / " + std::string(fields[1]) +
                                    " / " + std::string(fields[2]));
    }
  }
  return dictionary;
}

Dictionary Dictionary::load_file(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in.is_open()) {
    throw IoFailure("cannot open dictionary file: " + source.string());
  }
  Dictionary dictionary = load(in);
  if (in.bad()) {
    throw IoFailure("failed reading dictionary file: " + source.string());
  }
  return dictionary;
}

}  // namespace cdsedge
