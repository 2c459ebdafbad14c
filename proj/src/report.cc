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
#include "ftm/report.h"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace ftm {
namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

const char* to_string(QueryMode mode) {
  return mode == QueryMode::kNaive ? "naive" : "filtered";
}

QueryRecord record_of(const std::string& query_id, const FederationResult& r,
                      std::optional<std::uint64_t> database_size) {
  QueryRecord q;
  q.query_id = query_id;
  q.result_ids = r.ids;
  q.wall_ms = r.wall_ms;
  q.bytes_up = r.bytes_up();
  q.bytes_down = r.bytes_down();
  q.grids = r.grids;
  q.candidates = r.candidates();
  q.partitions = r.partitions();
  q.surviving = r.surviving();
  q.sessions = r.sessions();
  q.comparisons = r.comparisons();
  if (!database_size) {
    std::uint64_t total = 0;
    bool all = true;
    for (const auto& o : r.owners) {
      if (!o.database_size) all = false;
      total += o.database_size.value_or(0);
    }
    if (all) database_size = total;
  }
  if (database_size && *database_size > 0) {
    q.retention = static_cast<double>(q.candidates) / static_cast<double>(*database_size);
  }
  return q;
}

ReportAggregate RunReport::aggregate() const {
  ReportAggregate a;
  a.queries = records.size();
  if (records.empty()) return a;
  double retention_sum = 0.0;
  std::size_t retention_n = 0;
  for (const auto& r : records) {
    a.mean_wall_ms += r.wall_ms;
    a.mean_bytes_up += static_cast<double>(r.bytes_up);
    a.mean_bytes_down += static_cast<double>(r.bytes_down);
    a.mean_grids += static_cast<double>(r.grids);
    a.mean_partitions += r.partitions;
    a.mean_surviving += r.surviving;
    a.mean_comparisons += static_cast<double>(r.comparisons);
    if (r.retention) {
      retention_sum += *r.retention;
      ++retention_n;
    }
  }
  const double n = static_cast<double>(records.size());
  a.mean_wall_ms /= n;
  a.mean_bytes_up /= n;
  a.mean_bytes_down /= n;
  a.mean_grids /= n;
  a.mean_partitions /= n;
  a.mean_surviving /= n;
  a.mean_comparisons /= n;
  if (retention_n > 0) a.mean_retention = retention_sum / static_cast<double>(retention_n);
  return a;
}

std::string to_json(const RunReport& report, bool include_timing) {
  using nlohmann::json;
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"query_id", r.query_id},
                       {"result_ids", r.result_ids},
                       {"wall_ms", include_timing ? r.wall_ms : 0.0},
                       {"bytes_up", r.bytes_up},
                       {"bytes_down", r.bytes_down},
                       {"retention", optional_number(r.retention)},
                       {"grids", r.grids},
                       {"candidates", r.candidates},
                       {"partitions", r.partitions},
                       {"surviving_partitions", r.surviving},
                       {"sessions", r.sessions},
                       {"comparisons", r.comparisons}});
  }
  const ReportAggregate a = report.aggregate();
  json agg = {{"queries", a.queries},
              {"mean_wall_ms", include_timing ? a.mean_wall_ms : 0.0},
              {"mean_bytes_up", a.mean_bytes_up},
              {"mean_bytes_down", a.mean_bytes_down},
              {"mean_retention", optional_number(a.mean_retention)},
              {"mean_grids", a.mean_grids},
              {"mean_partitions", a.mean_partitions},
              {"mean_surviving_partitions", a.mean_surviving},
              {"mean_comparisons", a.mean_comparisons}};
  json doc = {{"schema_version", kReportSchemaVersion},
              {"mode", report.mode},
              {"seed", report.seed},
              {"records", std::move(records)},
              {"aggregate", std::move(agg)}};
  return doc.dump(2);
}

std::string to_table(const RunReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %7s %10s %12s %12s %9s %6s %6s %5s\n",
                "query", "matches", "wall_ms", "bytes_up", "bytes_down",
                "retention", "|G_Q|", "parts", "n_r");
  out << line;
  for (const auto& r : report.records) {
    char retention[32] = "-";
    if (r.retention) std::snprintf(retention, sizeof(retention), "%.4f", *r.retention);
    std::snprintf(line, sizeof(line),
                  "%-12s %7zu %10.2f %12llu %12llu %9s %6zu %6u %5u\n",
                  r.query_id.c_str(), r.result_ids.size(), r.wall_ms,
                  static_cast<unsigned long long>(r.bytes_up),
                  static_cast<unsigned long long>(r.bytes_down), retention,
                  r.grids, r.partitions, r.surviving);
    out << line;
  }
  const ReportAggregate a = report.aggregate();
  char retention[32] = "-";
  if (a.mean_retention) std::snprintf(retention, sizeof(retention), "%.4f", *a.mean_retention);
  std::snprintf(line, sizeof(line),
                "%-12s %7zu %10.2f %12.0f %12.0f %9s %6.1f %6.1f %5.1f\n", "mean",
                a.queries, a.mean_wall_ms, a.mean_bytes_up, a.mean_bytes_down,
                retention, a.mean_grids, a.mean_partitions, a.mean_surviving);
  out << line;
  return out.str();
}

}  // namespace ftm
