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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "cdsedge/codec.hpp"
#include "cdsedge/dictionary.hpp"
#include "cdsedge/errors.hpp"

namespace httplib {
class Server;
}

namespace cdsedge {

enum class EdgeMode { Cds, Relay };

std::string_view to_string(EdgeMode mode);                          // "cds" / "relay"
std::optional<EdgeMode> parse_edge_mode(std::string_view token);

class TooManyRecords : public Error {
public:
  using Error::Error;
};
class SourceUnreachable : public Error {
public:
  using Error::Error;
};
class EdgeUnreachable : public Error {
public:
  using Error::Error;
};
class BindFailure : public Error {
public:
  using Error::Error;
};

// Non-200 edge response; carries the status and error body.
class EdgeError : public Error {
public:
  EdgeError(int status, std::string body);
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

private:
  int status_;
  std::string body_;
};

struct EdgeConfig {
  std::string source_url = "http://127.0.0.1:8080";
  EdgeMode mode = EdgeMode::Cds;  // applied when a request names no mode
  std::uint32_t max_records = 650;
  std::filesystem::path dictionary_path;
  CodecConfig codec;
};

// Self-measured cost of the local transformation only; cascade-request and
// response wire time are excluded. The clock starts after the last cascade
// byte is received and stops before the first response byte is written.
struct ProcessingReport {
  std::uint64_t processing_millis = 0;
  std::size_t records_in = 0;
  std::size_t bytes_in = 0;
  std::size_t bytes_out = 0;
  EdgeMode mode = EdgeMode::Cds;
};

struct EdgeResponse {
  std::string payload;
  ProcessingReport report;
};

// Relay baseline: caches the incoming bytes and splits the buffer into
// individual records before transmitting them; the split is the measured
// processing cost. Output bytes equal input bytes for well-formed lines.
EdgeResponse relay_records(std::string raw);

// HTTP data source. `GET /data?records=N` serves the first N lines of a
// hosted `prices-<M>.tsv` file: the exact match when present, otherwise the
// smallest file with at least N lines. 400 on a bad query, 404 when no file
// can satisfy N.
class SourceServer {
public:
  explicit SourceServer(std::filesystem::path data_dir);
  ~SourceServer();
  SourceServer(const SourceServer&) = delete;
  SourceServer& operator=(const SourceServer&) = delete;

  // Binds without serving; port 0 picks an ephemeral port. Returns the bound
  // port. Throws BindFailure.
  int bind(const std::string& host, int port);
  void serve();  // blocking; returns after stop()
  void stop();
  bool wait_ready(std::chrono::milliseconds timeout) const;

private:
  std::filesystem::path data_dir_;
  std::unique_ptr<httplib::Server> server_;
};

// Edge node. `GET /process?records=N&mode=cds|relay` triggers a cascade
// request to the source, processes (CDS-encode or relay) and answers with the
// payload plus headers `X-Processing-Millis` and `X-Records`. Errors: 413
// TooManyRecords, 502 SourceUnreachable, 400 bad query. Requests are handled
// one at a time; concurrent requests queue.
class EdgeNode {
public:
  explicit EdgeNode(EdgeConfig cfg);  // loads the dictionary from cfg.dictionary_path
  EdgeNode(EdgeConfig cfg, Dictionary dictionary);
  ~EdgeNode();
  EdgeNode(const EdgeNode&) = delete;
  EdgeNode& operator=(const EdgeNode&) = delete;

  // The transformation behind /process, usable without HTTP. Throws
  // TooManyRecords, SourceUnreachable, and codec/dictionary errors.
  EdgeResponse handle_request(std::size_t n, EdgeMode mode);

  int bind(const std::string& host, int port);
  void serve();
  void stop();
  bool wait_ready(std::chrono::milliseconds timeout) const;

  const EdgeConfig& config() const noexcept { return cfg_; }
  const Dictionary& dictionary() const noexcept { return dictionary_; }

private:
  void wire_routes();

  EdgeConfig cfg_;
  Dictionary dictionary_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex serial_;  // one request in flight, as on a single-core device
};

// One latency observation. Wall-clock is measured on the client's clock;
// processing is the edge's self-report, so on multi-host deployments the two
// are different clock domains.
struct LatencyMeasurement {
  std::size_t record_amount = 0;
  EdgeMode mode = EdgeMode::Cds;
  double wall_clock_seconds = 0.0;
  double processing_seconds = 0.0;
};

struct FetchResult {
  LatencyMeasurement measurement;
  std::string payload;
  std::size_t reported_records = 0;  // X-Records header
};

// Issues one request against a running edge node and measures the wall-clock
// duration from request to last body byte. Throws EdgeUnreachable when no
// connection can be made and EdgeError on a non-200 response.
FetchResult client_fetch(const std::string& edge_url, std::size_t n, EdgeMode mode);

}  // namespace cdsedge
