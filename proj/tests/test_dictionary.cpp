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

#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace cdsedge;

namespace {

const CompositeKey k0{"m3.large", "Linux/UNIX", "us-east-1a"};
const CompositeKey k1{"t2.micro", "Windows", "eu-west-1c"};

}  // namespace

TEST_CASE("build assigns dense ids in first-occurrence order") {
  const Dictionary singleton = Dictionary::build({k0});
  CHECK(singleton.size() == 1);
  CHECK(singleton.lookup(k0) == 0);

  const Dictionary deduped = Dictionary::build({k0, k1, k0});
  CHECK(deduped.size() == 2);
  CHECK(deduped.lookup(k0) == 0);
  CHECK(deduped.lookup(k1) == 1);
}

TEST_CASE("build rejects an empty key set") {
  CHECK_THROWS_AS(Dictionary::build({}), EmptyKeySet);
}

TEST_CASE("lookup and reverse error paths") {
  const Dictionary dictionary = Dictionary::build({k0});
  CHECK_THROWS_AS(dictionary.lookup(k1), UnknownKey);
  CHECK(dictionary.reverse(0) == k0);
  CHECK_THROWS_AS(dictionary.reverse(1), UnknownId);  // one past the end
  CHECK(dictionary.contains(k0));
  CHECK_FALSE(dictionary.contains(k1));
}

TEST_CASE("lookup and reverse are exact inverses") {
  const Dictionary dictionary = Dictionary::build(default_key_universe());
  for (std::uint32_t id = 0; id < dictionary.size(); ++id) {
    CHECK(dictionary.lookup(dictionary.reverse(id)) == id);
  }
  for (const CompositeKey& key : dictionary.entries()) {
    CHECK(dictionary.reverse(dictionary.lookup(key)) == key);
  }
}

TEST_CASE("save/load round-trip through a stream") {
  const Dictionary dictionary = Dictionary::build({k0, k1, {"c5.large", "SUSE Linux", "us-west-2a"}});
  std::stringstream stream;
  dictionary.save(stream);
  CHECK(Dictionary::load(stream) == dictionary);
}

TEST_CASE("save_file/load_file round-trip and report bytes") {
  testing::TempDir tmp;
  const Dictionary dictionary = Dictionary::build(default_key_universe());
  const std::size_t bytes = dictionary.save_file(tmp.file("dict.tsv"));
  CHECK(bytes == std::filesystem::file_size(tmp.file("dict.tsv")));
  CHECK(Dictionary::load_file(tmp.file("dict.tsv")) == dictionary);
}

TEST_CASE("ids are stable across save/load") {
  const Dictionary dictionary = Dictionary::build(default_key_universe());
  std::stringstream stream;
  dictionary.save(stream);
  const Dictionary reloaded = Dictionary::load(stream);
  for (const CompositeKey& key : dictionary.entries()) {
    CHECK(reloaded.lookup(key) == dictionary.lookup(key));
  }
}

TEST_CASE("load rejects malformed files") {
  SUBCASE("duplicate key") {
    std::stringstream stream("a\tb\tc\na\tb\tc\n");
    CHECK_THROWS_AS(Dictionary::load(stream), MalformedDictionaryFile);
  }
  SUBCASE("bad field count") {
    std::stringstream stream("a\tb\n");
    CHECK_THROWS_AS(Dictionary::load(stream), MalformedDictionaryFile);
  }
  SUBCASE("blank line") {
    std::stringstream stream("a\tb\tc\n\n");
    CHECK_THROWS_AS(Dictionary::load(stream), MalformedDictionaryFile);
  }
  SUBCASE("empty field") {
    std::stringstream stream("a\t\tc\n");
    CHECK_THROWS_AS(Dictionary::load(stream), MalformedDictionaryFile);
  }
}

TEST_CASE("load_file of a missing path fails") {
  testing::TempDir tmp;
  CHECK_THROWS_AS(Dictionary::load_file(tmp.file("missing.tsv")), IoFailure);
}

TEST_CASE("a mid-sized synthetic universe round-trips") {
  std::vector<CompositeKey> keys;
  for (int t = 0; t < 10; ++t) {
    for (int o = 0; o < 8; ++o) {
      for (int z = 0; z < 56; ++z) {
        keys.push_back({"type-" + std::to_string(t), "os-" + std::to_string(o),
                        "zone-" + std::to_string(z)});
      }
    }
  }
  const Dictionary dictionary = Dictionary::build(keys);
  CHECK(dictionary.size() == 10 * 8 * 56);
  CHECK(dictionary.lookup(keys.back()) == dictionary.size() - 1);

  testing::TempDir tmp;
  dictionary.save_file(tmp.file("universe.tsv"));
  CHECK(Dictionary::load_file(tmp.file("universe.tsv")) == dictionary);
}
