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
#include "ftm/grid.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ftm/errors.h"

namespace ftm {
namespace {

std::int32_t to_cell_index(double v) {
  const double f = std::floor(v);
  if (!(f >= std::numeric_limits<std::int32_t>::min() &&
        f <= std::numeric_limits<std::int32_t>::max())) {
    throw DomainError("grid coordinate out of range: " + std::to_string(v));
  }
  return static_cast<std::int32_t>(f);
}

struct Interval {
  double lo;
  double hi;
};

// Liang-Barsky: parameters u in [0,1] with a + u(b-a) inside r.
std::optional<Interval> clip_to_rect(Vec2 a, Vec2 b, const Rect& r) {
  double u0 = 0.0;
  double u1 = 1.0;
  const Vec2 d = b - a;
  const std::array<double, 4> p = {-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q = {a.x - r.lo.x, r.hi.x - a.x, a.y - r.lo.y,
                                   r.hi.y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      u0 = std::max(u0, t);
    } else {
      u1 = std::min(u1, t);
    }
    if (u0 > u1) return std::nullopt;
  }
  return Interval{u0, u1};
}

std::optional<Interval> clip_to_disc(Vec2 a, Vec2 b, Vec2 c, double radius) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double qa = dot(d, d);
  const double qb = 2.0 * dot(f, d);
  const double qc = dot(f, f) - radius * radius;
  if (qa == 0.0) {
    if (qc <= 0.0) return Interval{0.0, 1.0};
    return std::nullopt;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double u0 = std::max(0.0, (-qb - s) / (2.0 * qa));
  const double u1 = std::min(1.0, (-qb + s) / (2.0 * qa));
  if (u0 > u1) return std::nullopt;
  return Interval{u0, u1};
}

// Parameter interval of ab inside the rectangle dilated by tau (a rounded
// rectangle, convex, so the result is a single interval).
std::optional<Interval> clip_to_dilated(Vec2 a, Vec2 b, const Rect& r,
                                        double tau) {
  std::optional<Interval> out;
  auto merge = [&out](std::optional<Interval> piece) {
    if (!piece) return;
    if (!out) {
      out = piece;
    } else {
      out->lo = std::min(out->lo, piece->lo);
      out->hi = std::max(out->hi, piece->hi);
    }
  };
  merge(clip_to_rect(a, b, {{r.lo.x - tau, r.lo.y}, {r.hi.x + tau, r.hi.y}}));
  merge(clip_to_rect(a, b, {{r.lo.x, r.lo.y - tau}, {r.hi.x, r.hi.y + tau}}));
  merge(clip_to_disc(a, b, r.lo, tau));
  merge(clip_to_disc(a, b, r.hi, tau));
  merge(clip_to_disc(a, b, {r.lo.x, r.hi.y}, tau));
  merge(clip_to_disc(a, b, {r.hi.x, r.lo.y}, tau));
  return out;
}

Point point_at(const Segment& s, double u) {
  if (u <= 0.0) return s.o;
  if (u >= 1.0) return s.d;
  return {s.o.ts + u * (s.d.ts - s.o.ts), s.o.loc + u * (s.d.loc - s.o.loc)};
}

}  // namespace

GridId GridSpec::cell_of(Vec2 p) const {
  return {to_cell_index((p.x - origin.x) / cell_size),
          to_cell_index((p.y - origin.y) / cell_size)};
}

Rect GridSpec::rect_of(GridId g) const {
  const Vec2 lo{origin.x + g.ix * cell_size, origin.y + g.iy * cell_size};
  return {lo, {lo.x + cell_size, lo.y + cell_size}};
}

double squared_distance(Vec2 p, const Rect& r) {
  const double dx = std::max({r.lo.x - p.x, 0.0, p.x - r.hi.x});
  const double dy = std::max({r.lo.y - p.y, 0.0, p.y - r.hi.y});
  return dx * dx + dy * dy;
}

double squared_distance(Vec2 a, Vec2 b, const Rect& r) {
  if (clip_to_rect(a, b, r)) return 0.0;
  double best = std::min(squared_distance(a, r), squared_distance(b, r));
  const std::array<Vec2, 4> corners = {
      r.lo, r.hi, Vec2{r.lo.x, r.hi.y}, Vec2{r.hi.x, r.lo.y}};
  for (Vec2 c : corners) {
    best = std::min(best, squared_distance_to_segment(c, a, b));
  }
  return best;
}

std::vector<GridId> traversal_grids(const Trajectory& t, double tau,
                                    const GridSpec& spec) {
  if (!(tau > 0.0)) throw DomainError("traversal_grids: tau must be > 0");
  const double tau2 = tau * tau;
  const double L = spec.cell_size;
  // Candidate enumeration only; the exact distance test decides.
  const double slack = 1e-9 * L;
  std::vector<GridId> out;
  for (const Segment& s : segments_of(t)) {
    const Vec2 a = s.o.loc;
    const Vec2 b = s.d.loc;
    const double xmin = std::min(a.x, b.x) - tau - slack;
    const double xmax = std::max(a.x, b.x) + tau + slack;
    const std::int32_t ix0 = to_cell_index((xmin - spec.origin.x) / L);
    const std::int32_t ix1 = to_cell_index((xmax - spec.origin.x) / L);
    for (std::int32_t ix = ix0; ix <= ix1; ++ix) {
      const double cx0 = spec.origin.x + ix * L - tau - slack;
      const double cx1 = spec.origin.x + (ix + 1) * L + tau + slack;
      double u0 = 0.0;
      double u1 = 1.0;
      if (a.x == b.x) {
        if (a.x < cx0 || a.x > cx1) continue;
      } else {
        const double ua = (cx0 - a.x) / (b.x - a.x);
        const double ub = (cx1 - a.x) / (b.x - a.x);
        u0 = std::max(0.0, std::min(ua, ub));
        u1 = std::min(1.0, std::max(ua, ub));
        if (u0 > u1) continue;
      }
      const double y0 = a.y + u0 * (b.y - a.y);
      const double y1 = a.y + u1 * (b.y - a.y);
      const double ylo = std::min(y0, y1) - tau - slack;
      const double yhi = std::max(y0, y1) + tau + slack;
      const std::int32_t iy0 = to_cell_index((ylo - spec.origin.y) / L);
      const std::int32_t iy1 = to_cell_index((yhi - spec.origin.y) / L);
      for (std::int32_t iy = iy0; iy <= iy1; ++iy) {
        const GridId g{ix, iy};
        if (squared_distance(a, b, spec.rect_of(g)) <= tau2) out.push_back(g);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Presence> presence_window(const Trajectory& t, GridId g,
                                        double tau, const GridSpec& spec) {
  const Rect r = spec.rect_of(g);
  // Widen by a hair so that rounding never shrinks the window.
  const double reach = tau * (1.0 + 1e-9) + 1e-9;
  const std::vector<Segment> segs = segments_of(t);
  std::optional<Point> entry;
  for (const Segment& s : segs) {
    if (auto iv = clip_to_dilated(s.o.loc, s.d.loc, r, reach)) {
      entry = point_at(s, iv->lo);
      break;
    }
  }
  if (!entry) return std::nullopt;
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (auto iv = clip_to_dilated(it->o.loc, it->d.loc, r, reach)) {
      return Presence{*entry, point_at(*it, iv->hi)};
    }
  }
  return std::nullopt;
}

}  // namespace ftm
