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

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cdsedge/codec.hpp"
#include "cdsedge/netpipe.hpp"
#include "cdsedge/record.hpp"

namespace cdsedge::testing {

// --------------------------------------------------------------------------
// Filesystem helpers

class TempDir {
public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cdsedge-test-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out.good()) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --------------------------------------------------------------------------
// In-process testbed

class RunningSource {
public:
  explicit RunningSource(std::filesystem::path data_dir) : server_(std::move(data_dir)) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.serve(); });
    if (!server_.wait_ready(std::chrono::milliseconds(5000))) {
      throw std::runtime_error("source did not become ready");
    }
  }
  ~RunningSource() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  SourceServer& server() { return server_; }

private:
  SourceServer server_;
  int port_ = 0;
  std::thread thread_;
};

class RunningEdge {
public:
  RunningEdge(EdgeConfig cfg, Dictionary dictionary)
      : node_(std::move(cfg), std::move(dictionary)) {
    port_ = node_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { node_.serve(); });
    if (!node_.wait_ready(std::chrono::milliseconds(5000))) {
      throw std::runtime_error("edge did not become ready");
    }
  }
  explicit RunningEdge(EdgeConfig cfg) : node_(std::move(cfg)) {
    port_ = node_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { node_.serve(); });
    if (!node_.wait_ready(std::chrono::milliseconds(5000))) {
      throw std::runtime_error("edge did not become ready");
    }
  }
  ~RunningEdge() {
    node_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  EdgeNode& node() { return node_; }

private:
  EdgeNode node_;
  int port_ = 0;
  std::thread thread_;
};

// --------------------------------------------------------------------------
// Independent oracles (kept deliberately simple; they must not share code
// with the implementation paths they check)

// Expected segmentation: linear scan that re-bases whenever the distance from
// the current base reaches the interval. Returns (base, deltas) per segment.
struct ExpectedSegment {
  std::int64_t base = 0;
  std::vector<std::int64_t> deltas;
};

inline std::vector<ExpectedSegment> segmentation_oracle(
    const std::vector<SpotPriceRecord>& records, std::int64_t interval) {
  std::vector<ExpectedSegment> segments;
  for (const auto& record : records) {
    if (segments.empty() || record.timestamp_epoch - segments.back().base >= interval) {
      segments.push_back(ExpectedSegment{record.timestamp_epoch, {}});
    }
    segments.back().deltas.push_back(record.timestamp_epoch - segments.back().base);
  }
  return segments;
}

// Minimal total cost of any prefix-free code for up to 6 symbols: enumerates
// every length vector in [1,5]^k and keeps the cheapest one satisfying the
// Kraft inequality (scaled to integers at 2^5).
inline std::uint64_t optimal_prefix_cost(const std::vector<std::uint64_t>& counts) {
  const std::size_t k = counts.size();
  if (k == 0 || k > 6) {
    throw std::runtime_error("oracle handles 1..6 symbols");
  }
  std::vector<unsigned> lengths(k, 1);
  std::uint64_t best = UINT64_MAX;
  while (true) {
    unsigned kraft = 0;
    for (const unsigned length : lengths) {
      kraft += 32u >> length;
    }
    if (kraft <= 32u) {
      std::uint64_t cost = 0;
      for (std::size_t i = 0; i < k; ++i) {
        cost += counts[i] * lengths[i];
      }
      if (cost < best) {
        best = cost;
      }
    }
    std::size_t position = 0;
    while (position < k && lengths[position] == 5) {
      lengths[position] = 1;
      ++position;
    }
    if (position == k) {
      break;
    }
    ++lengths[position];
  }
  return best;
}

// Kraft sum scaled by 2^64; exactly 2^64 means equality.
inline bool kraft_holds(const HuffmanCodeTable& table, bool* equality = nullptr) {
  unsigned __int128 sum = 0;
  for (const auto& [id, length] : table.canonical_lengths()) {
    sum += static_cast<unsigned __int128>(1) << (64 - length);
  }
  const auto one = static_cast<unsigned __int128>(1) << 64;
  if (equality != nullptr) {
    *equality = sum == one;
  }
  return sum <= one;
}

inline bool prefix_free(const HuffmanCodeTable& table) {
  const auto lengths = table.canonical_lengths();
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      if (i == j) continue;
      const HuffmanCode a = table.code_for(lengths[i].first);
      const HuffmanCode b = table.code_for(lengths[j].first);
      if (a.length <= b.length && (b.bits >> (b.length - a.length)) == a.bits) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace cdsedge::testing
