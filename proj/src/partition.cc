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
#include "ftm/partition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ftm/errors.h"

namespace ftm {
namespace {

std::vector<TimeInterval> envelope(std::span<const TrajId> members,
                                   const PresenceTable& presence) {
  const std::size_t n_grids = presence.grids().size();
  std::vector<TimeInterval> out(
      n_grids, {std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()});
  for (TrajId id : members) {
    const auto& row = presence.of(id);
    for (std::size_t k = 0; k < n_grids; ++k) {
      out[k].entry = std::min(out[k].entry, row[k].entry.ts);
      out[k].exit = std::max(out[k].exit, row[k].exit.ts);
    }
  }
  return out;
}

void split(std::vector<TrajId> members, const PresenceTable& presence,
           std::size_t max_size, std::vector<Partition>& out) {
  std::vector<TimeInterval> intervals = envelope(members, presence);
  if (members.size() <= max_size) {
    out.push_back({std::move(members), std::move(intervals)});
    return;
  }
  const auto grids = presence.grids();
  std::size_t pick = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const double span = intervals[k].exit - intervals[k].entry;
    if (span > best || (span == best && grids[k] < grids[pick])) {
      best = span;
      pick = k;
    }
  }
  std::vector<double> ends;
  ends.reserve(members.size());
  for (TrajId id : members) ends.push_back(presence.of(id)[pick].exit.ts);
  std::vector<double> sorted = ends;
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  const double median = sorted[mid];

  std::vector<TrajId> left;
  std::vector<TrajId> right;
  for (std::size_t i = 0; i < members.size(); ++i) {
    (ends[i] <= median ? left : right).push_back(members[i]);
  }
  if (left.empty() || right.empty()) {
    const std::size_t half = (members.size() + 1) / 2;
    left.assign(members.begin(), members.begin() + half);
    right.assign(members.begin() + half, members.end());
  }
  split(std::move(left), presence, max_size, out);
  split(std::move(right), presence, max_size, out);
}

}  // namespace

std::size_t PartitionParams::max_size(std::size_t candidates) const {
  const double m = std::floor(alpha * std::sqrt(static_cast<double>(candidates)));
  return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

PresenceTable::PresenceTable(std::span<const TrajId> candidates,
                             std::span<const GridId> grids, double tau,
                             const GridSpec& spec, const Lookup& lookup)
    : grids_(grids.begin(), grids.end()) {
  rows_.reserve(candidates.size());
  for (TrajId id : candidates) {
    const Trajectory& t = lookup(id);
    std::vector<Presence> row;
    row.reserve(grids_.size());
    for (const GridId& g : grids_) {
      auto p = presence_window(t, g, tau, spec);
      if (!p) {
        throw ProtocolError(
            ProtocolErrorCode::kInternal,
            "candidate '" + t.id + "' never comes within tau of grid (" +
                std::to_string(g.ix) + ", " + std::to_string(g.iy) +
                "); filter contract violated");
      }
      row.push_back(*p);
    }
    rows_.emplace(id, std::move(row));
  }
}

std::vector<Partition> partition(std::span<const TrajId> candidates,
                                 const PresenceTable& presence,
                                 std::size_t max_size) {
  if (candidates.empty()) throw DomainError("partition: no candidates");
  if (max_size == 0) throw DomainError("partition: max size must be >= 1");
  std::vector<Partition> out;
  split({candidates.begin(), candidates.end()}, presence, max_size, out);
  return out;
}

ReferenceTrajectory reference_trajectory(const Partition& part,
                                         const PresenceTable& presence) {
  if (part.members.empty()) {
    throw DomainError("reference_trajectory: empty partition");
  }
  ReferenceTrajectory rt;
  const std::size_t n_grids = presence.grids().size();
  rt.segments.reserve(n_grids);
  for (std::size_t k = 0; k < n_grids; ++k) {
    const Presence* first = nullptr;
    const Presence* last = nullptr;
    for (TrajId id : part.members) {
      const Presence& p = presence.of(id)[k];
      if (first == nullptr || p.entry.ts < first->entry.ts) first = &p;
      if (last == nullptr || p.exit.ts > last->exit.ts) last = &p;
    }
    Segment s;
    s.o.ts = std::floor(first->entry.ts / kQuantum) * kQuantum;
    s.o.loc = {quantize(first->entry.loc.x), quantize(first->entry.loc.y)};
    s.d.ts = std::ceil(last->exit.ts / kQuantum) * kQuantum;
    s.d.loc = {quantize(last->exit.loc.x), quantize(last->exit.loc.y)};
    rt.segments.push_back(s);
  }
  return rt;
}

double prune_threshold(double tau, double cell_size) {
  if (!(cell_size > tau)) {
    throw ConfigError("pruning needs grid size L > tau (L=" +
                      std::to_string(cell_size) +
                      ", tau=" + std::to_string(tau) +
                      "); increase the grid size");
  }
  return tau + std::numbers::sqrt2 * cell_size;
}

}  // namespace ftm
