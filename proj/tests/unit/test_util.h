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
#ifndef FTM_TESTS_TEST_UTIL_H_
#define FTM_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ftm/bpl.h"
#include "ftm/geometry.h"
#include "ftm/grid.h"

namespace ftm::testing {

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Random walk with strictly increasing timestamps, quantized.
inline Trajectory random_trajectory(Rng& rng, std::size_t n, double extent,
                                    double step, std::string id = "t") {
  Trajectory t;
  t.id = std::move(id);
  double ts = uniform(rng, 0.0, 50.0);
  Vec2 at{uniform(rng, 0.0, extent), uniform(rng, 0.0, extent)};
  for (std::size_t i = 0; i < n; ++i) {
    t.points.push_back({ts, at});
    ts += uniform(rng, 0.5, 10.0);
    at = {at.x + uniform(rng, -step, step), at.y + uniform(rng, -step, step)};
  }
  return quantized(std::move(t));
}

// Query that follows `base` at sampled instants, displaced by up to `noise`.
inline Trajectory follower_query(Rng& rng, const Trajectory& base, std::size_t n,
                                 double noise, double time_slack = 0.0) {
  Trajectory q;
  q.id = "q";
  const double t0 = base.start_time() - time_slack;
  const double t1 = base.end_time() + time_slack;
  std::vector<double> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(uniform(rng, t0, t1));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (double t : ts) {
    Vec2 at{uniform(rng, -noise, noise), uniform(rng, -noise, noise)};
    // Interpolate by hand so the oracle side does not reuse locate().
    if (t >= base.start_time() && t <= base.end_time()) {
      for (std::size_t i = 0; i + 1 < base.points.size(); ++i) {
        const Point& a = base.points[i];
        const Point& b = base.points[i + 1];
        if (t >= a.ts && t <= b.ts) {
          const double f = b.ts > a.ts ? (t - a.ts) / (b.ts - a.ts) : 0.0;
          at = {at.x + a.loc.x + f * (b.loc.x - a.loc.x),
                at.y + a.loc.y + f * (b.loc.y - a.loc.y)};
          break;
        }
      }
    } else {
      at = {at.x + base.points.front().loc.x, at.y + base.points.front().loc.y};
    }
    q.points.push_back({t, at});
  }
  q = quantized(std::move(q));
  // Quantization can merge two instants; keep the first.
  std::vector<Point> dedup;
  for (const Point& p : q.points) {
    if (dedup.empty() || p.ts > dedup.back().ts) dedup.push_back(p);
  }
  q.points = std::move(dedup);
  return q;
}

// Independent matching oracle: every query point must be within tau of
// the position on some segment covering its timestamp, scanning all
// segments (a single-point trajectory is its own zero-length segment).
inline bool brute_force_matches(const Trajectory& t, const Trajectory& q, double tau) {
  for (const Point& p : q.points) {
    bool hit = false;
    const std::size_t n = t.points.size();
    for (std::size_t i = 0; i < std::max<std::size_t>(n, 2) - 1 && !hit; ++i) {
      const Point& a = t.points[i];
      const Point& b = n == 1 ? t.points[0] : t.points[i + 1];
      if (p.ts < a.ts || p.ts > b.ts) continue;
      const double f = b.ts > a.ts ? (p.ts - a.ts) / (b.ts - a.ts) : 0.0;
      const double x = a.loc.x + f * (b.loc.x - a.loc.x);
      const double y = a.loc.y + f * (b.loc.y - a.loc.y);
      hit = std::hypot(p.loc.x - x, p.loc.y - y) <= tau;
    }
    if (!hit) return false;
  }
  return true;
}

// Dense-sampling rasterization of the traversal grids: sample every
// segment every `step` meters and add every cell whose closed square is
// within tau of a sample.
inline std::set<GridId> dense_traversal(const Trajectory& t, double tau,
                                        const GridSpec& spec, double step) {
  std::set<GridId> out;
  auto add_disc = [&](Vec2 c) {
    const GridId lo = spec.cell_of({c.x - tau, c.y - tau});
    const GridId hi = spec.cell_of({c.x + tau, c.y + tau});
    // One extra ring so cells tangent at exactly tau are tested too.
    for (int ix = lo.ix - 1; ix <= hi.ix + 1; ++ix) {
      for (int iy = lo.iy - 1; iy <= hi.iy + 1; ++iy) {
        const double x0 = spec.origin.x + ix * spec.cell_size;
        const double y0 = spec.origin.y + iy * spec.cell_size;
        const double dx = std::max({x0 - c.x, 0.0, c.x - (x0 + spec.cell_size)});
        const double dy = std::max({y0 - c.y, 0.0, c.y - (y0 + spec.cell_size)});
        if (dx * dx + dy * dy <= tau * tau) out.insert({ix, iy});
      }
    }
  };
  const auto& pts = t.points;
  add_disc(pts.front().loc);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i].loc;
    const Vec2 b = pts[i + 1].loc;
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int k = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int j = 1; j <= k; ++j) {
      const double f = static_cast<double>(j) / k;
      add_disc({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    }
  }
  return out;
}

// Plaintext form of the secure predicate over a bare segment list (a
// reference trajectory): every query point must fall inside the time
// window of some segment and lie within tau of that segment's position.
inline bool segments_cover(const std::vector<Segment>& segs, const Trajectory& q,
                           double tau) {
  for (const Point& p : q.points) {
    bool hit = false;
    for (const Segment& s : segs) {
      if (p.ts < s.o.ts || p.ts > s.d.ts) continue;
      const double f = s.d.ts > s.o.ts ? (p.ts - s.o.ts) / (s.d.ts - s.o.ts) : 0.0;
      const double x = s.o.loc.x + f * (s.d.loc.x - s.o.loc.x);
      const double y = s.o.loc.y + f * (s.d.loc.y - s.o.loc.y);
      if (std::hypot(p.loc.x - x, p.loc.y - y) <= tau) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace ftm::testing

#endif  // FTM_TESTS_TEST_UTIL_H_
