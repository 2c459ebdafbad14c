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
#include "ftm/trajectory_io.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ftm/errors.h"

namespace ftm {
namespace {

constexpr double kEarthRadiusM = 6371008.8;

Trajectory parse_record(const std::string& line, std::size_t line_no,
                        const ReadOptions& options) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestionError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw IngestionError(line_no, "record is not an object");
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) {
    throw IngestionError(line_no, "missing string field 'id'");
  }
  auto pts = j.find("points");
  if (pts == j.end() || !pts->is_array()) {
    throw IngestionError(line_no, "missing array field 'points'");
  }
  Trajectory t;
  t.id = id->get<std::string>();
  t.points.reserve(pts->size());
  for (const auto& p : *pts) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() ||
        !p[1].is_number() || !p[2].is_number()) {
      throw IngestionError(line_no, "point must be [ts, x, y] numbers");
    }
    Point point{p[0].get<double>(), {p[1].get<double>(), p[2].get<double>()}};
    if (options.geographic) {
      point.loc = options.geographic->to_plane(point.loc.x, point.loc.y);
    }
    t.points.push_back(point);
  }
  t = quantized(std::move(t));
  try {
    validate(t);
  } catch (const IngestionError& e) {
    throw IngestionError(line_no, e.what());
  }
  return t;
}

}  // namespace

Vec2 Projection::to_plane(double lon_deg, double lat_deg) const {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double x = kEarthRadiusM * (lon_deg - ref_lon_deg) * kDeg *
                   std::cos(ref_lat_deg * kDeg);
  const double y = kEarthRadiusM * (lat_deg - ref_lat_deg) * kDeg;
  return {x, y};
}

std::vector<Trajectory> read_ndjson(std::istream& in,
                                    const ReadOptions& options) {
  std::vector<Trajectory> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Trajectory t = parse_record(line, line_no, options);
    if (!seen.insert(t.id).second) {
      throw IngestionError(line_no, "duplicate trajectory id '" + t.id + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> read_ndjson_file(const std::string& path,
                                         const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IngestionError(0, "cannot open " + path);
  return read_ndjson(in, options);
}

std::string to_ndjson_line(const Trajectory& t) {
  // Fixed three decimals keeps the quantized values exact on re-read.
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "{\"id\":" << nlohmann::json(t.id).dump() << ",\"points\":[";
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const Point& p = t.points[i];
    if (i) os << ',';
    os << '[' << p.ts << ',' << p.loc.x << ',' << p.loc.y << ']';
  }
  os << "]}";
  return os.str();
}

void write_ndjson(std::ostream& out, const std::vector<Trajectory>& ts) {
  for (const auto& t : ts) out << to_ndjson_line(t) << '\n';
}

}  // namespace ftm
