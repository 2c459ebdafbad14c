//
// Copyright 2026 The ftm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#ifndef FTM_REPORT_H_
#define FTM_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftm/client.h"

namespace ftm {

inline constexpr int kReportSchemaVersion = 1;

struct QueryRecord {
  std::string query_id;
  std::vector<std::string> result_ids;
  double wall_ms = 0.0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::optional<double> retention;  // |TC| / |TD| when |TD| is known
  std::size_t grids = 0;            // |G_Q|
  std::uint64_t candidates = 0;
  std::uint32_t partitions = 0;
  std::uint32_t surviving = 0;      // n_r
  std::uint64_t sessions = 0;
  std::uint64_t comparisons = 0;
};

// `database_size` overrides what owners disclosed when the caller knows
// |TD| itself.
QueryRecord record_of(const std::string& query_id, const FederationResult& r,
                      std::optional<std::uint64_t> database_size = std::nullopt);

struct ReportAggregate {
  std::size_t queries = 0;
  double mean_wall_ms = 0.0;
  double mean_bytes_up = 0.0;
  double mean_bytes_down = 0.0;
  std::optional<double> mean_retention;  // over records that have one
  double mean_grids = 0.0;
  double mean_partitions = 0.0;
  double mean_surviving = 0.0;
  double mean_comparisons = 0.0;
};

struct RunReport {
  std::string mode;  // "filtered" or "naive"
  std::uint64_t seed = 0;
  std::vector<QueryRecord> records;

  ReportAggregate aggregate() const;
};

const char* to_string(QueryMode mode);

// JSON (schema in docs/run_report.schema.json). With include_timing false
// every wall-clock field is written as 0, so reports of seeded runs
// compare byte for byte.
std::string to_json(const RunReport& report, bool include_timing = true);
std::string to_table(const RunReport& report);

}  // namespace ftm

#endif  // FTM_REPORT_H_
