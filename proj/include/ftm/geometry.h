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
#ifndef FTM_GEOMETRY_H_
#define FTM_GEOMETRY_H_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftm {

// Planar coordinate in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double squared_norm(Vec2 a) { return dot(a, a); }

// Timestamped location. ts is seconds, loc is meters.
struct Point {
  double ts = 0.0;
  Vec2 loc;

  friend bool operator==(const Point&, const Point&) = default;
};

// Linear piece of a trajectory, o.ts <= d.ts.
struct Segment {
  Point o;
  Point d;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Trajectory {
  std::string id;
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  double start_time() const { return points.front().ts; }
  double end_time() const { return points.back().ts; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

double euclidean(Vec2 a, Vec2 b);

// Location on s at ts by linear interpolation. Zero-duration segments
// resolve to s.o.loc. Throws DomainError when ts is outside the span.
Vec2 interpolate(const Segment& s, double ts);

// Location of t at ts, using the earliest segment whose span holds ts.
// Empty when ts is outside the trajectory's time span.
std::optional<Vec2> locate(const Trajectory& t, double ts);

// Whether candidate matches query under tau: every query point has a
// location on candidate at its timestamp within tau.
bool matches(const Trajectory& candidate, const Trajectory& query, double tau);

// Consecutive point pairs. A single-point trajectory yields one
// zero-duration segment so it still covers its own timestamp.
std::vector<Segment> segments_of(const Trajectory& t);

// Checks the data model: at least one point, finite values, ts >= 0,
// non-decreasing timestamps, and equal timestamps only at equal locations.
// Throws IngestionError (line 0).
void validate(const Trajectory& t);

// Fixed-point resolution shared by ingestion and the secure backend:
// millimeters and milliseconds.
inline constexpr double kQuantum = 1e-3;

inline double quantize(double v) { return std::round(v / kQuantum) * kQuantum; }
Trajectory quantized(Trajectory t);

// Squared distance from p to the segment ab.
double squared_distance_to_segment(Vec2 p, Vec2 a, Vec2 b);

}  // namespace ftm

#endif  // FTM_GEOMETRY_H_
