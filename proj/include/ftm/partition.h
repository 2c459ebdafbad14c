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
#ifndef FTM_PARTITION_H_
#define FTM_PARTITION_H_

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ftm/geometry.h"
#include "ftm/grid.h"
#include "ftm/grid_index.h"

namespace ftm {

struct PartitionParams {
  double alpha = 0.5;

  // m = floor(alpha sqrt(|TC|)), never below 1.
  std::size_t max_size(std::size_t candidates) const;
};

// Per-candidate presence in each published grid, aligned with G_Q order.
// A member's presence in g is its time window within tau of cell g (see
// presence_window); every filtered candidate has one for every grid.
class PresenceTable {
 public:
  using Lookup = std::function<const Trajectory&(TrajId)>;

  // Throws ProtocolError(kInternal) when a candidate never comes within
  // tau of some grid, i.e. the filter contract was broken upstream.
  PresenceTable(std::span<const TrajId> candidates,
                std::span<const GridId> grids, double tau,
                const GridSpec& spec, const Lookup& lookup);

  const std::vector<Presence>& of(TrajId id) const { return rows_.at(id); }
  std::span<const GridId> grids() const { return grids_; }

 private:
  std::vector<GridId> grids_;
  std::unordered_map<TrajId, std::vector<Presence>> rows_;
};

struct TimeInterval {
  double entry = 0.0;
  double exit = 0.0;
};

struct Partition {
  std::vector<TrajId> members;
  std::vector<TimeInterval> intervals;  // per grid, aligned with G_Q
};

// Recursive median split until every partition holds at most m members.
// The split grid is the one with the longest timespan over the members
// (ties: smallest GridId), the split value the lower median of members'
// exit times there. Members at the median go left; if a side would be
// empty the members are halved in order instead.
std::vector<Partition> partition(std::span<const TrajId> candidates,
                                 const PresenceTable& presence,
                                 std::size_t max_size);

// One segment per published grid, from the earliest entry to the latest
// exit of any member. Timestamps are widened outward to whole
// milliseconds so quantization never shrinks the envelope.
struct ReferenceTrajectory {
  std::vector<Segment> segments;
};
ReferenceTrajectory reference_trajectory(const Partition& part,
                                         const PresenceTable& presence);

// Pruning threshold tau + sqrt(2) L. Requires L > tau (ConfigError
// otherwise: increase the grid size).
double prune_threshold(double tau, double cell_size);

}  // namespace ftm

#endif  // FTM_PARTITION_H_
