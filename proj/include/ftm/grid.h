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
#ifndef FTM_GRID_H_
#define FTM_GRID_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ftm/geometry.h"

namespace ftm {

struct GridId {
  std::int32_t ix = 0;
  std::int32_t iy = 0;

  friend auto operator<=>(const GridId&, const GridId&) = default;
};

struct GridIdHash {
  std::size_t operator()(const GridId& g) const noexcept {
    const auto packed = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(g.ix)) << 32) |
                        static_cast<std::uint32_t>(g.iy);
    return std::hash<std::uint64_t>{}(packed * 0x9E3779B97F4A7C15ULL);
  }
};

struct Rect {
  Vec2 lo;
  Vec2 hi;
};

// Uniform square tessellation shared by every federation participant.
struct GridSpec {
  Vec2 origin;
  double cell_size = 1.0;  // L

  GridId cell_of(Vec2 p) const;
  Rect rect_of(GridId g) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Squared distance from p to the closed rectangle (0 inside).
double squared_distance(Vec2 p, const Rect& r);

// Squared distance between segment ab and the closed rectangle.
double squared_distance(Vec2 a, Vec2 b, const Rect& r);

// Cells within distance tau of some location of t, intermediate segment
// locations included; tangent cells count. Sorted ascending.
std::vector<GridId> traversal_grids(const Trajectory& t, double tau,
                                    const GridSpec& spec);

// Time window during which t stays within tau of cell g: first entry into
// and last exit from the tau-dilated cell, with the interpolated
// locations at both instants.
struct Presence {
  Point entry;
  Point exit;
};
std::optional<Presence> presence_window(const Trajectory& t, GridId g,
                                        double tau, const GridSpec& spec);

}  // namespace ftm

#endif  // FTM_GRID_H_
