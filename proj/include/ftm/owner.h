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
#ifndef FTM_OWNER_H_
#define FTM_OWNER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ftm/channel.h"
#include "ftm/config.h"
#include "ftm/grid_index.h"
#include "ftm/partition.h"
#include "ftm/secure_verify.h"
#include "ftm/transcript.h"
#include "ftm/wire.h"

namespace ftm {

struct OwnerSettings {
  GridSpec spec;
  double tau = 50.0;
  PartitionParams partition;
  CostModel cost;
  unsigned parallelism = 1;  // concurrent sessions within one batch
  bool disclose_database_size = false;
};

OwnerSettings settings_of(const OwnerConfig& config);

// What one query cost the owner. Never sent to the client.
struct OwnerQueryStats {
  QueryMode mode = QueryMode::kFiltered;
  std::size_t grids = 0;
  std::uint64_t candidates = 0;
  std::uint32_t partitions = 0;
  std::uint32_t surviving = 0;  // n_r
  std::uint64_t prune_sessions = 0;
  std::uint64_t validate_sessions = 0;
  std::uint64_t comparisons = 0;
  double filter_ms = 0.0;
  double prune_ms = 0.0;
  double validate_ms = 0.0;
  std::vector<std::string> matched;
};

// One data owner: immutable database, index and evaluator shared by all
// connections; per-query state lives on the stack of handle().
class OwnerNode {
 public:
  // Throws ConfigError when the index was built for another tessellation
  // or tau, or when L <= tau (pruning would be unsound to configure).
  OwnerNode(OwnerSettings settings, std::vector<Trajectory> db, GridIndex index);
  // Builds the index itself.
  OwnerNode(OwnerSettings settings, std::vector<Trajectory> db);

  // Runs the owner side of one query on `stream`. On any protocol
  // failure an Error frame is sent (best effort) and the error rethrown.
  OwnerQueryStats handle(ByteStream& stream, Transcript* transcript = nullptr) const;

  const OwnerSettings& settings() const { return settings_; }
  const GridIndex& index() const { return index_; }
  const std::vector<Trajectory>& database() const { return db_; }
  const SimulatedIdealEvaluator& evaluator() const { return evaluator_; }

 private:
  OwnerSettings settings_;
  std::vector<Trajectory> db_;
  std::vector<std::vector<FixedSegment>> fixed_segments_;
  GridIndex index_;
  SimulatedIdealEvaluator evaluator_;
};

// TCP front end: one thread per accepted connection.
class OwnerServer {
 public:
  OwnerServer(std::shared_ptr<const OwnerNode> node, const Endpoint& listen);

  std::uint16_t port() const { return listener_.port(); }
  // Accepts until stop(); joins connection threads before returning.
  void run();
  void stop();

 private:
  std::shared_ptr<const OwnerNode> node_;
  TcpListener listener_;
  std::atomic<bool> stopping_{false};
};

// Loads the database, loads the index (building and persisting it first
// when the index file is missing or --build-index was requested), then
// serves forever.
void serve(const OwnerConfig& config, bool rebuild_index);

}  // namespace ftm

#endif  // FTM_OWNER_H_
