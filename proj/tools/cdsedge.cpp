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

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cdsedge/bench.hpp"
#include "cdsedge/codec.hpp"
#include "cdsedge/dictionary.hpp"
#include "cdsedge/netpipe.hpp"
#include "cdsedge/record.hpp"

namespace {

using namespace cdsedge;

volatile std::sig_atomic_t g_signal_seen = 0;

void on_signal(int) { g_signal_seen = 1; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) {
    throw IoFailure("cannot open file: " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoFailure("failed reading file: " + path.string());
  }
  return content;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) {
    throw IoFailure("cannot open file for writing: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out.good()) {
    throw IoFailure("failed writing file: " + path.string());
  }
}

IdEncoding encoding_from(const std::string& name) {
  return name == "bitwise" ? IdEncoding::BitwiseHuffman : IdEncoding::Bytewise;
}

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

using ConfigSetters = std::map<std::string, std::function<void(const std::string&)>>;

// Key=value config file: one pair per line, blank lines and '#' comments
// allowed. A key fills its option only when the command line did not set it,
// so the precedence is flag > config file > default.
void apply_config_file(const CLI::App& sub, const std::filesystem::path& path,
                       const ConfigSetters& setters) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw IoFailure("cannot open config file: " + path.string());
  }
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string content = trimmed(line);
    if (content.empty() || content[0] == '#') {
      continue;
    }
    const auto where = path.string() + ":" + std::to_string(line_number);
    const std::size_t equals = content.find('=');
    if (equals == std::string::npos) {
      throw Error(where + ": expected key=value");
    }
    const std::string key = trimmed(content.substr(0, equals));
    const std::string value = trimmed(content.substr(equals + 1));
    const auto setter = setters.find(key);
    if (setter == setters.end()) {
      throw Error(where + ": unknown config key '" + key + "'");
    }
    if (sub.count("--" + key) > 0) {
      continue;  // command line wins
    }
    try {
      setter->second(value);
    } catch (const std::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
}

template <typename T>
T config_number(const std::string& value) {
  T out{};
  if (!CLI::detail::lexical_cast(value, out)) {
    throw Error("bad numeric value '" + value + "'");
  }
  return out;
}

std::string config_choice(const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* candidate : allowed) {
    if (value == candidate) return value;
  }
  throw Error("bad value '" + value + "'");
}

// Blocks in serve(); SIGINT/SIGTERM stop the server for a clean exit 0.
template <typename ServerT>
int serve_until_signal(ServerT& server, const char* name) {
  g_signal_seen = 0;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_signal_seen) {
        server.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  server.serve();
  done.store(true);
  watcher.join();
  std::cout << "[" << name << "] shut down" << std::endl;
  return 0;
}

struct GenOptions {
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string universe;
  std::string universe_out;
  std::int64_t start_epoch = GeneratorConfig{}.start_epoch;
  std::uint32_t max_step = GeneratorConfig{}.max_step_seconds;
  std::uint64_t price_min = GeneratorConfig{}.price_range_micro.first;
  std::uint64_t price_max = GeneratorConfig{}.price_range_micro.second;
};

int run_gen(const GenOptions& opt) {
  GeneratorConfig cfg = GeneratorConfig::defaults();
  cfg.seed = opt.seed;
  cfg.start_epoch = opt.start_epoch;
  cfg.max_step_seconds = opt.max_step;
  cfg.price_range_micro = {opt.price_min, opt.price_max};
  if (!opt.universe.empty()) {
    cfg.key_universe = Dictionary::load_file(opt.universe).entries();
  }
  const auto records = gen_records(opt.n, cfg);
  const std::string text = render_records_text(records);
  const std::string out_path =
      opt.out.empty() ? "prices-" + std::to_string(opt.n) + ".tsv" : opt.out;
  write_file(out_path, text);
  std::cout << "[gen] wrote " << records.size() << " records to " << out_path << " ("
            << text.size() << " bytes)" << std::endl;
  if (!opt.universe_out.empty()) {
    const std::size_t bytes = Dictionary::build(cfg.key_universe).save_file(opt.universe_out);
    std::cout << "[gen] wrote key universe dictionary to " << opt.universe_out << " (" << bytes
              << " bytes)" << std::endl;
  }
  return 0;
}

struct SourceOptions {
  std::string dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string config;
};

int run_serve_source(SourceOptions opt, const CLI::App& sub) {
  if (!opt.config.empty()) {
    const ConfigSetters setters{
        {"dir", [&](const std::string& v) { opt.dir = v; }},
        {"host", [&](const std::string& v) { opt.host = v; }},
        {"port", [&](const std::string& v) { opt.port = config_number<int>(v); }},
    };
    apply_config_file(sub, opt.config, setters);
  }
  if (opt.dir.empty()) {
    throw Error("missing --dir (or dir= in the config file)");
  }
  SourceServer server(opt.dir);
  const int port = server.bind(opt.host, opt.port);
  std::size_t hosted = 0;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(opt.dir, ec)) {
    if (entry.is_regular_file()) {
      ++hosted;
    }
  }
  std::cout << "[source] ready addr=" << opt.host << ":" << port << " dir=" << opt.dir
            << " files=" << hosted << std::endl;
  return serve_until_signal(server, "source");
}

struct EdgeOptions {
  std::string host = "127.0.0.1";
  int port = 8081;
  std::string source_url = "http://127.0.0.1:8080";
  std::string dict;
  std::string mode = "cds";
  std::uint32_t max_records = 650;
  std::uint32_t base_interval = 86400;
  std::string id_encoding = "bytewise";
  std::string config;
};

int run_serve_edge(EdgeOptions opt, const CLI::App& sub) {
  if (!opt.config.empty()) {
    const ConfigSetters setters{
        {"host", [&](const std::string& v) { opt.host = v; }},
        {"port", [&](const std::string& v) { opt.port = config_number<int>(v); }},
        {"source-url", [&](const std::string& v) { opt.source_url = v; }},
        {"dict", [&](const std::string& v) { opt.dict = v; }},
        {"mode", [&](const std::string& v) { opt.mode = config_choice(v, {"cds", "relay"}); }},
        {"max-records",
         [&](const std::string& v) { opt.max_records = config_number<std::uint32_t>(v); }},
        {"base-interval",
         [&](const std::string& v) { opt.base_interval = config_number<std::uint32_t>(v); }},
        {"id-encoding",
         [&](const std::string& v) { opt.id_encoding = config_choice(v, {"bytewise", "bitwise"}); }},
    };
    apply_config_file(sub, opt.config, setters);
  }
  if (opt.dict.empty()) {
    throw Error("missing --dict (or dict= in the config file)");
  }
  EdgeConfig cfg;
  cfg.source_url = opt.source_url;
  cfg.mode = *parse_edge_mode(opt.mode);
  cfg.max_records = opt.max_records;
  cfg.dictionary_path = opt.dict;
  cfg.codec = CodecConfig{opt.base_interval, encoding_from(opt.id_encoding)};

  EdgeNode edge(cfg);  // loads (injects) the lookup table before serving
  std::cout << "[edge] dictionary loaded entries=" << edge.dictionary().size()
            << " path=" << opt.dict << std::endl;
  std::cout << "[edge] cascade source url=" << cfg.source_url << std::endl;
  const int port = edge.bind(opt.host, opt.port);
  std::cout << "[edge] ready addr=" << opt.host << ":" << port << " mode=" << to_string(cfg.mode)
            << " max_records=" << cfg.max_records
            << " id_encoding=" << opt.id_encoding << std::endl;
  return serve_until_signal(edge, "edge");
}

struct EncodeOptions {
  std::string in;
  std::string out;
  std::string dict;
  std::string id_encoding = "bytewise";
  std::uint32_t base_interval = 86400;
};

int run_encode(const EncodeOptions& opt) {
  const Dictionary dictionary = Dictionary::load_file(opt.dict);
  const std::string content = read_file(opt.in);
  const std::vector<SpotPriceRecord> records = parse_records_text(content);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!dictionary.contains(records[i].key())) {
      throw UnknownKey("line " + std::to_string(i + 1) + ": unknown composite key " +
                       records[i].instance_type + " / " + records[i].operating_system + " / " +
                       records[i].zone);
    }
  }
  const CompactBatch batch = encode_batch(
      records, dictionary, CodecConfig{opt.base_interval, encoding_from(opt.id_encoding)});
  const std::string payload = serialize_compact(batch);
  write_file(opt.out, payload);
  std::cout << "[encode] " << records.size() << " records, " << content.size() << " -> "
            << payload.size() << " bytes (" << opt.id_encoding << ")" << std::endl;
  return 0;
}

struct DecodeOptions {
  std::string in;
  std::string out;
  std::string dict;
};

int run_decode(const DecodeOptions& opt) {
  const Dictionary dictionary = Dictionary::load_file(opt.dict);
  const std::string payload = read_file(opt.in);
  const CompactBatch batch = parse_compact(payload);
  const std::vector<SpotPriceRecord> records = decode_batch(batch, dictionary);
  const std::string text = render_records_text(records);
  write_file(opt.out, text);
  std::cout << "[decode] " << records.size() << " records, " << payload.size() << " -> "
            << text.size() << " bytes" << std::endl;
  return 0;
}

struct BenchOptions {
  std::string edge_url = "http://127.0.0.1:8081";
  std::vector<std::size_t> amounts{kDefaultSweepAmounts.begin(), kDefaultSweepAmounts.end()};
  std::size_t reps = kDefaultRepetitions;
  std::size_t warmup = 0;
  std::string out;
  std::string format = "csv";
  bool assert_trends = false;
  TrendTolerance tolerance;
};

int run_bench(const BenchOptions& opt) {
  const BenchReport report = run_sweep(opt.amounts, opt.reps, opt.edge_url, {}, opt.warmup);
  const ReportFormat format =
      opt.format == "markdown" ? ReportFormat::Markdown : ReportFormat::Csv;
  const std::string text = emit_report(report, format);
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_file(opt.out, text);
    std::cout << "[bench] wrote report to " << opt.out << std::endl;
  }
  int rc = 0;
  if (!report.complete) {
    std::cerr << "[bench] sweep incomplete: " << report.error << std::endl;
    rc = 1;
  }
  if (opt.assert_trends) {
    const CheckResult trends = check_trends(report, opt.tolerance);
    for (const std::string& line : trends.detail) {
      std::cout << "[trend] " << line << std::endl;
    }
    if (!trends.passed) {
      rc = 1;
    }
  }
  return rc;
}

int run_fixture(bool table) {
  const CheckResult result = fixture_check();
  for (const std::string& line : result.detail) {
    std::cout << "[fixture] " << line << std::endl;
  }
  if (table) {
    std::cout << '\n' << emit_report(reference_report(), ReportFormat::Markdown);
  }
  std::cout << "[fixture] " << (result.passed ? "PASS" : "FAIL") << std::endl;
  return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact spot-price record codec and client/edge/source latency testbed"};
  app.option_defaults()->always_capture_default(true);
  app.require_subcommand(1);

  GenOptions gen_opt;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic raw price record file");
  gen->add_option("--n", gen_opt.n, "Number of records")->required();
  gen->add_option("--seed", gen_opt.seed, "Generator seed");
  gen->add_option("--out", gen_opt.out, "Output path (default: prices-<n>.tsv)");
  gen->add_option("--universe", gen_opt.universe, "Key universe file (dictionary format)");
  gen->add_option("--universe-out", gen_opt.universe_out,
                  "Also write the key universe as an injectable dictionary file");
  gen->add_option("--start-epoch", gen_opt.start_epoch, "First timestamp, epoch seconds");
  gen->add_option("--max-step", gen_opt.max_step, "Max gap between timestamps, seconds");
  gen->add_option("--price-min", gen_opt.price_min, "Min price, micro-units (multiple of 100)");
  gen->add_option("--price-max", gen_opt.price_max, "Max price, micro-units (multiple of 100)");

  SourceOptions source_opt;
  auto* serve_source = app.add_subcommand("serve-source", "Run the HTTP data source");
  serve_source->add_option("--dir", source_opt.dir, "Directory with prices-<N>.tsv files");
  serve_source->add_option("--host", source_opt.host, "Bind address");
  serve_source->add_option("--port", source_opt.port, "Bind port (0 picks an ephemeral port)");
  serve_source->add_option("--config", source_opt.config, "Key=value config file");

  EdgeOptions edge_opt;
  auto* serve_edge = app.add_subcommand("serve-edge", "Run the edge node");
  serve_edge->add_option("--host", edge_opt.host, "Bind address");
  serve_edge->add_option("--port", edge_opt.port, "Bind port (0 picks an ephemeral port)");
  serve_edge->add_option("--source-url", edge_opt.source_url, "Data source base URL");
  serve_edge->add_option("--dict", edge_opt.dict, "Dictionary file to inject");
  serve_edge->add_option("--mode", edge_opt.mode, "Default processing mode")
      ->check(CLI::IsMember({"cds", "relay"}));
  serve_edge->add_option("--max-records", edge_opt.max_records, "Per-request record cap");
  serve_edge->add_option("--base-interval", edge_opt.base_interval,
                         "Base timestamp interval, seconds");
  serve_edge->add_option("--id-encoding", edge_opt.id_encoding, "Composite id encoding")
      ->check(CLI::IsMember({"bytewise", "bitwise"}));
  serve_edge->add_option("--config", edge_opt.config, "Key=value config file");

  EncodeOptions encode_opt;
  auto* encode = app.add_subcommand("encode", "Encode a raw record file to compact form");
  encode->add_option("--in", encode_opt.in, "Raw record file")->required();
  encode->add_option("--out", encode_opt.out, "Compact output file")->required();
  encode->add_option("--dict", encode_opt.dict, "Dictionary file")->required();
  encode->add_option("--id-encoding", encode_opt.id_encoding, "Composite id encoding")
      ->check(CLI::IsMember({"bytewise", "bitwise"}));
  encode->add_option("--base-interval", encode_opt.base_interval,
                     "Base timestamp interval, seconds");

  DecodeOptions decode_opt;
  auto* decode = app.add_subcommand("decode", "Decode a compact file back to raw records");
  decode->add_option("--in", decode_opt.in, "Compact input file")->required();
  decode->add_option("--out", decode_opt.out, "Raw record output file")->required();
  decode->add_option("--dict", decode_opt.dict, "Dictionary file")->required();

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "Sweep record amounts over both modes");
  bench->add_option("--edge-url", bench_opt.edge_url, "Edge node base URL");
  bench->add_option("--amounts", bench_opt.amounts, "Record amounts to sweep")->delimiter(',');
  bench->add_option("--reps", bench_opt.reps, "Repetitions per amount and mode");
  bench->add_option("--warmup", bench_opt.warmup, "Discarded warm-up requests per cell");
  bench->add_option("--out", bench_opt.out, "Report file (default: stdout)");
  bench->add_option("--format", bench_opt.format, "Report format")
      ->check(CLI::IsMember({"csv", "markdown"}));
  bench->add_flag("--assert-trends", bench_opt.assert_trends,
                  "Fail when processing trends violate the tolerance");
  bench->add_option("--trend-violations", bench_opt.tolerance.max_violations,
                    "Tolerated monotonicity dips per mode");
  bench->add_option("--trend-relative", bench_opt.tolerance.relative,
                    "Relative bound for a tolerated dip");
  bench->add_option("--trend-abs-floor", bench_opt.tolerance.absolute_floor_seconds,
                    "Dips below this many seconds count as timer noise");

  bool fixture_table = false;
  auto* fixture = app.add_subcommand("fixture", "Check ratio arithmetic on the reference fixture");
  fixture->add_flag("--table", fixture_table, "Also print the fixture as a markdown table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_opt);
    if (serve_source->parsed()) return run_serve_source(source_opt, *serve_source);
    if (serve_edge->parsed()) return run_serve_edge(edge_opt, *serve_edge);
    if (encode->parsed()) return run_encode(encode_opt);
    if (decode->parsed()) return run_decode(decode_opt);
    if (bench->parsed()) return run_bench(bench_opt);
    if (fixture->parsed()) return run_fixture(fixture_table);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
