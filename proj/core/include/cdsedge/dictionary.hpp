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
#include <filesystem>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "cdsedge/errors.hpp"
#include "cdsedge/record.hpp"

namespace cdsedge {

class EmptyKeySet : public Error {
public:
  using Error::Error;
};
class UnknownKey : public Error {
public:
  using Error::Error;
};
class UnknownId : public Error {
public:
  using Error::Error;
};
class MalformedDictionaryFile : public Error {
public:
  using Error::Error;
};

struct CompositeKeyHash {
  std::size_t operator()(const CompositeKey& key) const noexcept;
};

// Bijection between composite keys and dense sequential ids [0, size()).
// Ids are assigned by first occurrence and stay stable across save/load:
// the 0-based line number of the persisted file is the id.
//
// File format: UTF-8 text, one entry per line,
// `instance_type<TAB>operating_system<TAB>zone`, LF endings.
//
// Immutable after construction; concurrent readers are safe.
class Dictionary {
public:
  Dictionary() = default;

  // Deduplicates keys preserving first occurrence; id = position in the
  // deduplicated order. Throws EmptyKeySet when no keys are given.
  static Dictionary build(const std::vector<CompositeKey>& keys);

  std::uint32_t lookup(const CompositeKey& key) const;  // UnknownKey
  const CompositeKey& reverse(std::uint32_t id) const;  // UnknownId
  bool contains(const CompositeKey& key) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<CompositeKey>& entries() const noexcept { return entries_; }

  void save(std::ostream& out) const;
  // Returns the number of bytes written. Throws IoFailure.
  std::size_t save_file(const std::filesystem::path& destination) const;

  // Throws MalformedDictionaryFile on a duplicate key or bad field count.
  static Dictionary load(std::istream& in);
  static Dictionary load_file(const std::filesystem::path& source);  // also IoFailure

  bool operator==(const Dictionary& other) const { return entries_ == other.entries_; }

private:
  bool insert(CompositeKey key);  // false when the key is already present

  std::vector<CompositeKey> entries_;
  std::unordered_map<CompositeKey, std::uint32_t, CompositeKeyHash> index_;
};

}  // namespace cdsedge
