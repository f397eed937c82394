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

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdsedge/errors.hpp"
#include "cdsedge/netpipe.hpp"

namespace cdsedge {

class DegenerateMeasurement : public Error {
public:
  using Error::Error;
};

// Computation-to-communication ratio:
//   processing / (wall_clock - processing).
// Throws DegenerateMeasurement when wall_clock <= processing, i.e. when the
// communication share is not positive and the ratio is undefined.
double compute_ratio(const LatencyMeasurement& m);

struct BenchRow {
  std::size_t record_amount = 0;
  LatencyMeasurement cds;    // per-mode arithmetic means over the repetitions
  LatencyMeasurement relay;
  std::optional<double> cds_ratio;    // nullopt flags a degenerate measurement
  std::optional<double> relay_ratio;
  double wall_clock_difference = 0.0;  // cds - relay
  double processing_difference = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // sorted by record_amount ascending
  std::size_t repetitions = 0;
  std::string corpus_descriptor;
  bool complete = true;
  std::string error;  // first propagated failure when incomplete
};

inline constexpr std::array<std::size_t, 7> kDefaultSweepAmounts{12, 25, 50, 100, 200, 400, 600};
inline constexpr std::size_t kDefaultRepetitions = 5;

using FetchObserver = std::function<void(const FetchResult&)>;

// Sequential sweep over amounts x {cds, relay}: `warmup` discarded fetches,
// then `repetitions` measured ones per cell, averaged per row. A fetch error
// aborts the sweep; the completed rows are preserved and the report is marked
// incomplete. The observer (when set) sees every measured fetch.
BenchReport run_sweep(std::vector<std::size_t> amounts, std::size_t repetitions,
                      const std::string& edge_url, const FetchObserver& on_fetch = {},
                      std::size_t warmup = 0);

// Reference latency fixture: averaged wall-clock and processing latencies for
// both modes at record amounts 12..600, measured once on a microcontroller
// testbed over WiFi. Used as an exact arithmetic fixture for the ratio
// computations; the absolute values are hardware-specific.
struct ReferenceLatencyRow {
  std::size_t record_amount;
  double cds_wall_seconds;
  double cds_processing_seconds;
  double relay_wall_seconds;
  double relay_processing_seconds;
};

std::span<const ReferenceLatencyRow> reference_fixture();

// The fixture as a BenchReport with ratios and differences filled in.
BenchReport reference_report();

struct CheckResult {
  bool passed = true;
  std::vector<std::string> detail;  // one printable line per check
};

// Recomputes both ratios for every fixture row, then verifies that CDS
// processing exceeds relay processing on each row and that the CDS ratio
// strictly increases with the record amount.
CheckResult fixture_check();

// Tolerances for trend checks on live sweeps. Localhost latencies are noisy
// at millisecond scale and the processing self-report quantizes to 1 ms, so
// dips below the absolute floor count as timer noise; larger dips within the
// relative band are tolerated up to max_violations per mode.
struct TrendTolerance {
  std::size_t max_violations = 1;
  double relative = 0.10;
  double absolute_floor_seconds = 0.002;
};

// Direction-of-effect checks over a live sweep: per-row mean CDS processing
// >= mean relay processing, and per-mode mean processing non-decreasing in
// record amount, both within the tolerance.
CheckResult check_trends(const BenchReport& report, const TrendTolerance& tolerance = {});

enum class ReportFormat { Csv, Markdown };

// CSV columns:
//   record_amount,cds_wall,cds_proc,relay_wall,relay_proc,
//   cds_ratio,relay_ratio,wall_diff,proc_diff
// Markdown mirrors the reference fixture's table layout.
std::string emit_report(const BenchReport& report, ReportFormat format);

}  // namespace cdsedge
