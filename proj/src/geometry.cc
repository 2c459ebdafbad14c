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
#include "ftm/geometry.h"

#include <algorithm>
#include <cmath>

#include "ftm/errors.h"

namespace ftm {

double euclidean(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec2 interpolate(const Segment& s, double ts) {
  if (!(ts >= s.o.ts && ts <= s.d.ts)) {
    throw DomainError("interpolate: timestamp " + std::to_string(ts) +
                      " outside segment span [" + std::to_string(s.o.ts) +
                      ", " + std::to_string(s.d.ts) + "]");
  }
  if (s.d.ts == s.o.ts || ts == s.o.ts) return s.o.loc;
  if (ts == s.d.ts) return s.d.loc;
  const double u = (ts - s.o.ts) / (s.d.ts - s.o.ts);
  return s.o.loc + u * (s.d.loc - s.o.loc);
}

std::optional<Vec2> locate(const Trajectory& t, double ts) {
  if (t.points.empty() || ts < t.start_time() || ts > t.end_time()) {
    return std::nullopt;
  }
  if (t.points.size() == 1) return t.points.front().loc;
  // First point with timestamp >= ts; the segment ending there is the
  // earliest one containing ts.
  auto it = std::lower_bound(
      t.points.begin(), t.points.end(), ts,
      [](const Point& p, double v) { return p.ts < v; });
  if (it == t.points.begin()) return it->loc;
  const Point& d = *it;
  const Point& o = *(it - 1);
  return interpolate(Segment{o, d}, ts);
}

bool matches(const Trajectory& candidate, const Trajectory& query,
             double tau) {
  for (const Point& q : query.points) {
    auto loc = locate(candidate, q.ts);
    if (!loc || euclidean(q.loc, *loc) > tau) return false;
  }
  return true;
}

std::vector<Segment> segments_of(const Trajectory& t) {
  std::vector<Segment> out;
  if (t.points.size() == 1) {
    out.push_back({t.points[0], t.points[0]});
    return out;
  }
  out.reserve(t.points.size() - 1);
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    out.push_back({t.points[i - 1], t.points[i]});
  }
  return out;
}

void validate(const Trajectory& t) {
  if (t.points.empty()) {
    throw IngestionError(0, "trajectory '" + t.id + "' has no points");
  }
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const Point& p = t.points[i];
    if (!std::isfinite(p.ts) || !std::isfinite(p.loc.x) ||
        !std::isfinite(p.loc.y)) {
      throw IngestionError(0, "trajectory '" + t.id + "' point " +
                                  std::to_string(i) + " is not finite");
    }
    if (p.ts < 0) {
      throw IngestionError(0, "trajectory '" + t.id + "' point " +
                                  std::to_string(i) + " has negative timestamp");
    }
    if (i == 0) continue;
    const Point& prev = t.points[i - 1];
    if (p.ts < prev.ts) {
      throw IngestionError(0, "trajectory '" + t.id + "' point " +
                                  std::to_string(i) +
                                  " goes back in time");
    }
    if (p.ts == prev.ts && !(p.loc == prev.loc)) {
      throw IngestionError(0, "trajectory '" + t.id + "' point " +
                                  std::to_string(i) +
                                  " repeats a timestamp at a new location");
    }
  }
}

Trajectory quantized(Trajectory t) {
  for (Point& p : t.points) {
    p.ts = quantize(p.ts);
    p.loc = {quantize(p.loc.x), quantize(p.loc.y)};
  }
  return t;
}

double squared_distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return squared_norm(p - a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return squared_norm(p - (a + u * ab));
}

}  // namespace ftm
