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

#include "cdsedge/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cdsedge {
namespace {

constexpr ReferenceLatencyRow kReferenceRows[] = {
    {12, 1.852, 0.735, 1.921, 0.539},    {25, 2.935, 1.765, 2.992, 1.012},
    {50, 5.039, 3.533, 4.902, 1.935},    {100, 9.148, 6.950, 8.672, 3.830},
    {200, 17.258, 13.791, 16.633, 7.713}, {400, 33.588, 27.199, 31.837, 14.868},
    {600, 50.765, 41.630, 48.487, 23.314},
};

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

std::string fmt_ratio(const std::optional<double>& ratio) {
  return ratio ? fmt("%.6f", *ratio) : std::string("nan");
}

void finalize_row(BenchRow& row) {
  try {
    row.cds_ratio = compute_ratio(row.cds);
  } catch (const DegenerateMeasurement&) {
    row.cds_ratio = std::nullopt;
  }
  try {
    row.relay_ratio = compute_ratio(row.relay);
  } catch (const DegenerateMeasurement&) {
    row.relay_ratio = std::nullopt;
  }
  row.wall_clock_difference = row.cds.wall_clock_seconds - row.relay.wall_clock_seconds;
  row.processing_difference = row.cds.processing_seconds - row.relay.processing_seconds;
}

}  // namespace

double compute_ratio(const LatencyMeasurement& m) {
  if (!(m.wall_clock_seconds > m.processing_seconds)) {
    throw DegenerateMeasurement("wall-clock " + fmt("%.6f", m.wall_clock_seconds) +
                                "s <= processing " + fmt("%.6f", m.processing_seconds) +
                                "s; communication time is not positive");
  }
  return m.processing_seconds / (m.wall_clock_seconds - m.processing_seconds);
}

BenchReport run_sweep(std::vector<std::size_t> amounts, std::size_t repetitions,
                      const std::string& edge_url, const FetchObserver& on_fetch,
                      std::size_t warmup) {
  if (repetitions < 1) {
    throw std::invalid_argument("repetitions must be >= 1");
  }
  std::sort(amounts.begin(), amounts.end());
  amounts.erase(std::unique(amounts.begin(), amounts.end()), amounts.end());

  BenchReport report;
  report.repetitions = repetitions;
  report.corpus_descriptor = "edge=" + edge_url + " reps=" + std::to_string(repetitions) +
                             " warmup=" + std::to_string(warmup);

  for (const std::size_t amount : amounts) {
    BenchRow row;
    row.record_amount = amount;
    try {
      for (const EdgeMode mode : {EdgeMode::Cds, EdgeMode::Relay}) {
        for (std::size_t i = 0; i < warmup; ++i) {
          client_fetch(edge_url, amount, mode);
        }
        double wall = 0.0;
        double processing = 0.0;
        for (std::size_t i = 0; i < repetitions; ++i) {
          const FetchResult fetch = client_fetch(edge_url, amount, mode);
          if (on_fetch) {
            on_fetch(fetch);
          }
          wall += fetch.measurement.wall_clock_seconds;
          processing += fetch.measurement.processing_seconds;
        }
        LatencyMeasurement mean{amount, mode, wall / static_cast<double>(repetitions),
                                processing / static_cast<double>(repetitions)};
        (mode == EdgeMode::Cds ? row.cds : row.relay) = mean;
      }
    } catch (const Error& e) {
      report.complete = false;
      report.error = "records=" + std::to_string(amount) + ": " + e.what();
      break;
    }
    finalize_row(row);
    report.rows.push_back(row);
  }
  return report;
}

std::span<const ReferenceLatencyRow> reference_fixture() { return kReferenceRows; }

BenchReport reference_report() {
  BenchReport report;
  report.repetitions = 1;
  report.corpus_descriptor = "embedded reference fixture";
  for (const ReferenceLatencyRow& fixture : reference_fixture()) {
    BenchRow row;
    row.record_amount = fixture.record_amount;
    row.cds = {fixture.record_amount, EdgeMode::Cds, fixture.cds_wall_seconds,
               fixture.cds_processing_seconds};
    row.relay = {fixture.record_amount, EdgeMode::Relay, fixture.relay_wall_seconds,
                 fixture.relay_processing_seconds};
    finalize_row(row);
    report.rows.push_back(row);
  }
  return report;
}

CheckResult fixture_check() {
  CheckResult result;
  double previous_ratio = -1.0;
  for (const ReferenceLatencyRow& row : reference_fixture()) {
    const double cds_ratio = compute_ratio(
        {row.record_amount, EdgeMode::Cds, row.cds_wall_seconds, row.cds_processing_seconds});
    const double relay_ratio = compute_ratio({row.record_amount, EdgeMode::Relay,
                                              row.relay_wall_seconds,
                                              row.relay_processing_seconds});
    const bool order_ok = row.cds_processing_seconds > row.relay_processing_seconds;
    const bool increase_ok = cds_ratio > previous_ratio;
    result.passed = result.passed && order_ok && increase_ok;
    result.detail.push_back(
        "records=" + std::to_string(row.record_amount) + " cds_ratio=" + fmt("%.6f", cds_ratio) +
        " relay_ratio=" + fmt("%.6f", relay_ratio) +
        " processing_order=" + (order_ok ? "ok" : "VIOLATED") +
        " ratio_increase=" + (increase_ok ? "ok" : "VIOLATED"));
    previous_ratio = cds_ratio;
  }
  return result;
}

CheckResult check_trends(const BenchReport& report, const TrendTolerance& tolerance) {
  CheckResult result;

  for (const BenchRow& row : report.rows) {
    const double gap = row.relay.processing_seconds - row.cds.processing_seconds;
    const bool ok = gap <= tolerance.absolute_floor_seconds ||
                    gap <= tolerance.relative * row.relay.processing_seconds;
    if (!ok) {
      result.passed = false;
      result.detail.push_back("records=" + std::to_string(row.record_amount) +
                              ": relay processing exceeds cds processing by " +
                              fmt("%.6f", gap) + "s");
    }
  }

  const auto check_monotone = [&](EdgeMode mode) {
    std::size_t violations = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      const auto& prev =
          mode == EdgeMode::Cds ? report.rows[i - 1].cds : report.rows[i - 1].relay;
      const auto& next = mode == EdgeMode::Cds ? report.rows[i].cds : report.rows[i].relay;
      const double drop = prev.processing_seconds - next.processing_seconds;
      if (drop <= tolerance.absolute_floor_seconds) {
        continue;  // timer noise, not a violation
      }
      if (drop > tolerance.relative * prev.processing_seconds) {
        result.passed = false;
        result.detail.push_back(std::string(to_string(mode)) + " processing drops by " +
                                fmt("%.6f", drop) + "s from records=" +
                                std::to_string(prev.record_amount) + " to records=" +
                                std::to_string(next.record_amount));
      } else {
        ++violations;
      }
    }
    if (violations > tolerance.max_violations) {
      result.passed = false;
      result.detail.push_back(std::string(to_string(mode)) + " processing has " +
                              std::to_string(violations) + " dips (allowed " +
                              std::to_string(tolerance.max_violations) + ")");
    } else {
      result.detail.push_back(std::string(to_string(mode)) + " processing trend: " +
                              std::to_string(violations) + " tolerated dip(s)");
    }
  };
  check_monotone(EdgeMode::Cds);
  check_monotone(EdgeMode::Relay);
  return result;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    out += "record_amount,cds_wall,cds_proc,relay_wall,relay_proc,cds_ratio,relay_ratio,"
           "wall_diff,proc_diff\n";
    for (const BenchRow& row : report.rows) {
      out += std::to_string(row.record_amount);
      out += ',' + fmt("%.6f", row.cds.wall_clock_seconds);
      out += ',' + fmt("%.6f", row.cds.processing_seconds);
      out += ',' + fmt("%.6f", row.relay.wall_clock_seconds);
      out += ',' + fmt("%.6f", row.relay.processing_seconds);
      out += ',' + fmt_ratio(row.cds_ratio);
      out += ',' + fmt_ratio(row.relay_ratio);
      out += ',' + fmt("%.6f", row.wall_clock_difference);
      out += ',' + fmt("%.6f", row.processing_difference);
      out += '\n';
    }
    if (!report.complete) {
      out += "# incomplete: " + report.error + '\n';
    }
    return out;
  }

  if (!report.corpus_descriptor.empty()) {
    out += report.corpus_descriptor + "\n\n";
  }
  out += "| Record Amount | CDS Wall-clock Latency | CDS Processing Latency | "
         "Non-CDS Wall-clock Latency | Non-CDS Processing Latency | CDS Ratio | Non-CDS Ratio | "
         "Wall-clock Diff | Processing Diff |\n";
  out += "|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const BenchRow& row : report.rows) {
    out += "| " + std::to_string(row.record_amount);
    out += " | " + fmt("%.3f", row.cds.wall_clock_seconds);
    out += " | " + fmt("%.3f", row.cds.processing_seconds);
    out += " | " + fmt("%.3f", row.relay.wall_clock_seconds);
    out += " | " + fmt("%.3f", row.relay.processing_seconds);
    out += " | " + fmt_ratio(row.cds_ratio);
    out += " | " + fmt_ratio(row.relay_ratio);
    out += " | " + fmt("%.3f", row.wall_clock_difference);
    out += " | " + fmt("%.3f", row.processing_difference);
    out += " |\n";
  }
  if (!report.complete) {
    out += "\n**incomplete:** " + report.error + '\n';
  }
  return out;
}

}  // namespace cdsedge
