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

#include "cdsedge/netpipe.hpp"

#include <algorithm>
#include <fstream>
#include <thread>
#include <vector>

#include <httplib.h>

#include "text_util.hpp"

namespace cdsedge {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_millis(Clock::time_point start, Clock::time_point end) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count());
}

// First `n` LF-terminated lines of `content`, or nullopt when there are fewer.
std::optional<std::string_view> first_lines(std::string_view content, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t line = 0; line < n; ++line) {
    if (pos >= content.size()) {
      return std::nullopt;
    }
    const std::size_t newline = content.find('\n', pos);
    pos = newline == std::string_view::npos ? content.size() : newline + 1;
  }
  return content.substr(0, pos);
}

int bind_server(httplib::Server& server, const std::string& host, int port) {
  if (port == 0) {
    const int bound = server.bind_to_any_port(host);
    if (bound <= 0) {
      throw BindFailure("cannot bind to " + host + " on an ephemeral port");
    }
    return bound;
  }
  if (!server.bind_to_port(host, port)) {
    throw BindFailure("cannot bind to " + host + ":" + std::to_string(port));
  }
  return port;
}

bool poll_running(const httplib::Server& server, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (!server.is_running()) {
    if (Clock::now() > deadline) {
      return false;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return true;
}

void answer_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(message, "text/plain");
}

}  // namespace

std::string_view to_string(EdgeMode mode) {
  return mode == EdgeMode::Cds ? std::string_view("cds") : std::string_view("relay");
}

std::optional<EdgeMode> parse_edge_mode(std::string_view token) {
  if (token == "cds") return EdgeMode::Cds;
  if (token == "relay") return EdgeMode::Relay;
  return std::nullopt;
}

EdgeError::EdgeError(int status, std::string body)
    : Error("edge returned HTTP " + std::to_string(status) + ": " + body),
      status_(status),
      body_(std::move(body)) {}

EdgeResponse relay_records(std::string raw) {
  const auto start = Clock::now();
  // Cache the incoming bytes, then split the buffer into individual records.
  std::vector<std::string_view> records;
  const std::string_view buffer = raw;
  std::size_t pos = 0;
  while (pos < buffer.size()) {
    const std::size_t newline = buffer.find('\n', pos);
    const std::size_t end = newline == std::string_view::npos ? buffer.size() : newline;
    if (end > pos) {
      records.push_back(buffer.substr(pos, end - pos));
    }
    pos = newline == std::string_view::npos ? buffer.size() : newline + 1;
  }
  std::string out;
  out.reserve(raw.size());
  for (const std::string_view record : records) {
    out.append(record);
    out.push_back('\n');
  }
  const auto stop = Clock::now();

  ProcessingReport report;
  report.processing_millis = elapsed_millis(start, stop);
  report.records_in = records.size();
  report.bytes_in = raw.size();
  report.bytes_out = out.size();
  report.mode = EdgeMode::Relay;
  return EdgeResponse{std::move(out), report};
}

// ---------------------------------------------------------------------------
// SourceServer

SourceServer::SourceServer(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/data", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("records")) {
      answer_error(res, 400, "missing records parameter");
      return;
    }
    const auto n = detail::parse_digits_u64(req.get_param_value("records"));
    if (!n) {
      answer_error(res, 400, "bad records parameter");
      return;
    }
    if (*n == 0) {
      res.set_content("", "text/plain");
      return;
    }

    // Hosted files are named prices-<M>.tsv; prefer the exact match, else the
    // smallest M >= n, and skip files that are shorter than they claim.
    std::vector<std::pair<std::uint64_t, std::filesystem::path>> candidates;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir_, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("prices-", 0) != 0 || name.size() < 12 ||
          name.substr(name.size() - 4) != ".tsv") {
        continue;
      }
      const auto m = detail::parse_digits_u64(name.substr(7, name.size() - 11));
      if (m && *m >= *n) {
        candidates.emplace_back(*m, entry.path());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [m, path] : candidates) {
      std::ifstream in(path, std::ios::binary);
      if (!in.is_open()) {
        continue;
      }
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const auto body = first_lines(content, *n);
      if (body) {
        res.set_content(std::string(*body), "text/plain");
        return;
      }
    }
    answer_error(res, 404, "no hosted file can satisfy records=" + std::to_string(*n));
  });
}

SourceServer::~SourceServer() { stop(); }

int SourceServer::bind(const std::string& host, int port) {
  return bind_server(*server_, host, port);
}

void SourceServer::serve() { server_->listen_after_bind(); }

void SourceServer::stop() { server_->stop(); }

bool SourceServer::wait_ready(std::chrono::milliseconds timeout) const {
  return poll_running(*server_, timeout);
}

// ---------------------------------------------------------------------------
// EdgeNode

EdgeNode::EdgeNode(EdgeConfig cfg) : EdgeNode(cfg, Dictionary::load_file(cfg.dictionary_path)) {}

EdgeNode::EdgeNode(EdgeConfig cfg, Dictionary dictionary)
    : cfg_(std::move(cfg)),
      dictionary_(std::move(dictionary)),
      server_(std::make_unique<httplib::Server>()) {
  if (cfg_.max_records < 1) {
    throw std::invalid_argument("max_records must be >= 1");
  }
  wire_routes();
}

EdgeNode::~EdgeNode() { stop(); }

void EdgeNode::wire_routes() {
  server_->Get("/process", [this](const httplib::Request& req, httplib::Response& res) {
    std::scoped_lock lock(serial_);
    if (!req.has_param("records")) {
      answer_error(res, 400, "missing records parameter");
      return;
    }
    const auto n = detail::parse_digits_u64(req.get_param_value("records"));
    if (!n) {
      answer_error(res, 400, "bad records parameter");
      return;
    }
    EdgeMode mode = cfg_.mode;
    if (req.has_param("mode")) {
      const auto parsed = parse_edge_mode(req.get_param_value("mode"));
      if (!parsed) {
        answer_error(res, 400, "bad mode parameter");
        return;
      }
      mode = *parsed;
    }
    try {
      EdgeResponse response = handle_request(*n, mode);
      res.set_header("X-Processing-Millis", std::to_string(response.report.processing_millis));
      res.set_header("X-Records", std::to_string(response.report.records_in));
      res.set_content(std::move(response.payload), "text/plain");
    } catch (const TooManyRecords& e) {
      answer_error(res, 413, e.what());
    } catch (const SourceUnreachable& e) {
      answer_error(res, 502, e.what());
    } catch (const Error& e) {
      answer_error(res, 500, e.what());
    }
  });
}

EdgeResponse EdgeNode::handle_request(std::size_t n, EdgeMode mode) {
  if (n > cfg_.max_records) {
    throw TooManyRecords("records=" + std::to_string(n) + " exceeds max_records=" +
                         std::to_string(cfg_.max_records));
  }

  httplib::Client source(cfg_.source_url);
  source.set_connection_timeout(5, 0);
  source.set_read_timeout(60, 0);
  auto result = source.Get("/data?records=" + std::to_string(n));
  if (!result) {
    throw SourceUnreachable("cascade request failed (" + httplib::to_string(result.error()) +
                            "): " + cfg_.source_url);
  }
  if (result->status != 200) {
    throw SourceUnreachable("source answered HTTP " + std::to_string(result->status) +
                            " for records=" + std::to_string(n));
  }
  std::string raw = std::move(result->body);

  if (mode == EdgeMode::Relay) {
    return relay_records(std::move(raw));
  }

  const auto start = Clock::now();
  const std::vector<SpotPriceRecord> records = parse_records_text(raw);
  const CompactBatch batch = encode_batch(records, dictionary_, cfg_.codec);
  std::string payload = serialize_compact(batch);
  const auto stop = Clock::now();

  ProcessingReport report;
  report.processing_millis = elapsed_millis(start, stop);
  report.records_in = records.size();
  report.bytes_in = raw.size();
  report.bytes_out = payload.size();
  report.mode = EdgeMode::Cds;
  return EdgeResponse{std::move(payload), report};
}

int EdgeNode::bind(const std::string& host, int port) {
  return bind_server(*server_, host, port);
}

void EdgeNode::serve() { server_->listen_after_bind(); }

void EdgeNode::stop() { server_->stop(); }

bool EdgeNode::wait_ready(std::chrono::milliseconds timeout) const {
  return poll_running(*server_, timeout);
}

// ---------------------------------------------------------------------------
// Client

FetchResult client_fetch(const std::string& edge_url, std::size_t n, EdgeMode mode) {
  httplib::Client client(edge_url);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(120, 0);
  const std::string path =
      "/process?records=" + std::to_string(n) + "&mode=" + std::string(to_string(mode));

  const auto start = Clock::now();
  auto result = client.Get(path);
  const auto stop = Clock::now();

  if (!result) {
    throw EdgeUnreachable("edge request failed (" + httplib::to_string(result.error()) +
                          "): " + edge_url);
  }
  if (result->status != 200) {
    throw EdgeError(result->status, result->body);
  }
  const auto millis = detail::parse_digits_u64(result->get_header_value("X-Processing-Millis"));
  if (!millis) {
    throw EdgeError(result->status, "missing or bad X-Processing-Millis header");
  }
  const auto records = detail::parse_digits_u64(result->get_header_value("X-Records"));
  if (!records) {
    throw EdgeError(result->status, "missing or bad X-Records header");
  }

  FetchResult fetch;
  fetch.measurement.record_amount = n;
  fetch.measurement.mode = mode;
  fetch.measurement.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
  fetch.measurement.processing_seconds = static_cast<double>(*millis) / 1000.0;
  fetch.payload = std::move(result->body);
  fetch.reported_records = *records;
  return fetch;
}

}  // namespace cdsedge
