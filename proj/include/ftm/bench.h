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
#ifndef FTM_BENCH_H_
#define FTM_BENCH_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ftm/client.h"
#include "ftm/owner.h"
#include "ftm/report.h"
#include "ftm/synth.h"

namespace ftm {

// Round-robin split of a corpus into k shards.
std::vector<std::vector<Trajectory>> shard(const std::vector<Trajectory>& db,
                                           std::size_t k);

// Owners living in this process, reached through in-memory pipes. Each
// query runs every owner's handle() on its own thread, exactly as a TCP
// server would.
class LocalFederation {
 public:
  LocalFederation(std::vector<std::vector<Trajectory>> shards,
                  const OwnerSettings& settings);

  std::size_t owners() const { return nodes_.size(); }
  std::size_t database_size() const;
  const OwnerNode& node(std::size_t i) const { return *nodes_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  // Owner-side stats and transcripts are filled when requested (one per
  // owner, same order as names()).
  FederationResult query(const Trajectory& q, const QueryOptions& options,
                         std::uint64_t seed,
                         std::vector<OwnerQueryStats>* owner_stats = nullptr,
                         std::vector<Transcript>* owner_transcripts = nullptr) const;

 private:
  std::vector<std::unique_ptr<OwnerNode>> nodes_;
  std::vector<std::string> names_;
};

struct SweepConfig {
  std::vector<double> epsilons = {0.01};
  std::vector<double> sampling_rates = {0.2};
  std::vector<double> alphas = {0.5};
  std::vector<std::size_t> db_sizes = {1000};
  std::vector<std::size_t> owner_counts = {1};
  std::size_t queries = 100;
  double tau = 50.0;
  double delta = 1e-5;
  double rho = 0.6;
  double p0 = 0.81;
  bool run_naive = true;
  CostModel cost;
  SynthParams synth;
  std::uint64_t seed = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  double sampling_rate = 0.0;
  double alpha = 0.0;
  std::size_t db_size = 0;
  std::size_t owners = 0;
  QueryMode mode = QueryMode::kFiltered;
  bool infeasible = false;
  std::string note;
  ReportAggregate aggregate;
  double mean_prune_ms = 0.0;     // owner side, summed over owners
  double mean_validate_ms = 0.0;
  bool results_equal = true;      // same result sets in both modes
};

// Cartesian product of the configured values, one row per cell and mode.
// Infeasible cells (no Delta root, L <= tau) are flagged and skipped.
std::vector<SweepRow> sweep(const SweepConfig& config, std::ostream* progress = nullptr);

// Columns: epsilon,sampling_rate,alpha,db_size,owners,mode,queries,
// retention,bytes,bytes_up,bytes_down,wall_ms,prune_ms,validate_ms,n_r,
// partitions,comparisons,results_equal,infeasible,note
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string sweep_csv_header();

}  // namespace ftm

#endif  // FTM_BENCH_H_
