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
#ifndef FTM_TRAJECTORY_IO_H_
#define FTM_TRAJECTORY_IO_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftm/geometry.h"

namespace ftm {

// Equirectangular projection around a reference point. Geographic
// corpora ([ts, lon, lat] records) are mapped to planar meters with it.
struct Projection {
  double ref_lat_deg = 0.0;
  double ref_lon_deg = 0.0;

  Vec2 to_plane(double lon_deg, double lat_deg) const;
};

struct ReadOptions {
  // When set, the two coordinates of each record are lon/lat degrees.
  std::optional<Projection> geographic;
};

// NDJSON, one trajectory per line:
//   {"id": "t1", "points": [[ts, x, y], ...]}
// Blank lines are skipped. Records are quantized and validated; any
// violation throws IngestionError carrying the 1-based line number.
std::vector<Trajectory> read_ndjson(std::istream& in,
                                    const ReadOptions& options = {});
std::vector<Trajectory> read_ndjson_file(const std::string& path,
                                         const ReadOptions& options = {});

void write_ndjson(std::ostream& out, const std::vector<Trajectory>& ts);
std::string to_ndjson_line(const Trajectory& t);

}  // namespace ftm

#endif  // FTM_TRAJECTORY_IO_H_
