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
#ifndef FTM_GRID_INDEX_H_
#define FTM_GRID_INDEX_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ftm/bytes.h"
#include "ftm/geometry.h"
#include "ftm/grid.h"

namespace ftm {

// Dense row number of a trajectory in its owner's database.
using TrajId = std::uint32_t;

// Inverted map from cell to the trajectories whose traversal grids hold
// it. Immutable after build; safe to share between query threads.
struct GridIndex {
  GridSpec spec;
  double tau = 0.0;
  // Each posting list is sorted ascending and duplicate-free.
  std::unordered_map<GridId, std::vector<TrajId>, GridIdHash> entries;

  const std::vector<TrajId>* postings(GridId g) const {
    auto it = entries.find(g);
    return it == entries.end() ? nullptr : &it->second;
  }

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

// Offline build. Trajectory i gets id i. Duplicate string ids throw
// IngestionError. parallelism > 1 splits the traversal computation.
GridIndex build_index(std::span<const Trajectory> db, double tau,
                      const GridSpec& spec, unsigned parallelism = 1);

// Ids present in every posting list of grids (ascending). A grid without
// an entry empties the result. Empty `grids` throws ProtocolError.
std::vector<TrajId> filter(const GridIndex& index,
                           std::span<const GridId> grids);

// Two sorted lists intersected by galloping search from the shorter one.
std::vector<TrajId> intersect_sorted(std::span<const TrajId> a,
                                     std::span<const TrajId> b);

inline constexpr std::uint16_t kIndexFormatVersion = 1;

// File layout (little-endian):
//   "FTMI" | u16 version | f64 origin.x | f64 origin.y | f64 L | f64 tau |
//   u64 entry count | per entry: i32 ix, i32 iy, u32 n, n LEB128 deltas |
//   u32 CRC32 of every byte after the version field.
Bytes serialize_index(const GridIndex& index);
GridIndex deserialize_index(std::span<const std::uint8_t> bytes);

void persist_index(const GridIndex& index, const std::string& path);
GridIndex load_index(const std::string& path);

}  // namespace ftm

#endif  // FTM_GRID_INDEX_H_
