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
#include "ftm/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ftm/errors.h"

namespace ftm {
namespace {

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller; one normal per call keeps the stream simple to replay.
double normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double clamp_to(double v, double extent) { return std::clamp(v, 0.0, extent); }

std::string id_of(std::size_t i) {
  std::string s = std::to_string(i);
  return "t" + std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

Vec2 waypoint(Rng& rng, const SynthParams& p, const std::vector<Vec2>& hotspots) {
  if (!hotspots.empty() && uniform01(rng) < p.hotspot_share) {
    const Vec2 c = hotspots[rng() % hotspots.size()];
    return {clamp_to(c.x + p.hotspot_sigma * normal(rng), p.extent),
            clamp_to(c.y + p.hotspot_sigma * normal(rng), p.extent)};
  }
  return {uniform(rng, 0, p.extent), uniform(rng, 0, p.extent)};
}

Trajectory walk(Rng& rng, const SynthParams& p, const std::vector<Vec2>& hotspots) {
  Trajectory t;
  const std::size_t n =
      p.min_points + static_cast<std::size_t>(rng() % (p.max_points - p.min_points + 1));
  double ts = uniform(rng, 0.0, p.day);
  Vec2 at = waypoint(rng, p, hotspots);
  Vec2 target = waypoint(rng, p, hotspots);
  double speed = uniform(rng, p.min_speed, p.max_speed);
  t.points.push_back({ts, at});
  while (t.points.size() < n) {
    const double dt = uniform(rng, p.min_interval, p.max_interval);
    double budget = speed * dt;
    while (budget > 0.0) {
      const Vec2 to = target - at;
      const double left = std::sqrt(squared_norm(to));
      if (left > budget) {
        at = at + (budget / left) * to;
        budget = 0.0;
      } else {
        at = target;
        budget -= left;
        target = waypoint(rng, p, hotspots);
        speed = uniform(rng, p.min_speed, p.max_speed);
      }
    }
    ts += dt;
    t.points.push_back({ts, at});
  }
  return t;
}

Trajectory companion_of(const Trajectory& base, Rng& rng, const SynthParams& p) {
  Trajectory t;
  for (const Point& q : base.points) {
    const double r = p.companion_offset * uniform01(rng);
    const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    t.points.push_back({q.ts, {q.loc.x + r * std::cos(a), q.loc.y + r * std::sin(a)}});
  }
  return t;
}

void check(const SynthParams& p) {
  if (!(p.extent > 0) || p.min_points < 1 || p.max_points < p.min_points ||
      !(p.min_speed >= 0) || p.max_speed < p.min_speed ||
      !(p.min_interval >= kQuantum) || p.max_interval < p.min_interval ||
      !(p.day >= 0) || p.companion_share < 0 || p.companion_share > 1 ||
      p.hotspot_share < 0 || p.hotspot_share > 1) {
    throw ConfigError("synthetic corpus: inconsistent parameters");
  }
}

}  // namespace

std::vector<Trajectory> generate_corpus(std::size_t n, const SynthParams& params,
                                        std::uint64_t seed) {
  check(params);
  Rng rng(seed);
  std::vector<Vec2> hotspots;
  for (std::size_t i = 0; i < params.hotspots; ++i) {
    // Keep hotspot centers away from the border.
    hotspots.push_back({uniform(rng, 0.15, 0.85) * params.extent,
                        uniform(rng, 0.15, 0.85) * params.extent});
  }
  std::vector<Trajectory> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Trajectory t = (i > 0 && uniform01(rng) < params.companion_share)
                       ? companion_of(out[rng() % out.size()], rng, params)
                       : walk(rng, params, hotspots);
    t.id = id_of(i);
    out.push_back(quantized(std::move(t)));
    validate(out.back());
  }
  return out;
}

Trajectory sample_query(const Trajectory& source, double rate, Rng& rng,
                        double jitter, std::string id) {
  if (source.points.empty()) throw DomainError("sample_query: empty source");
  if (!(rate > 0.0 && rate <= 1.0)) throw DomainError("sample_query: rate must be in (0, 1]");
  const std::size_t n = source.points.size();
  std::size_t keep = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  keep = std::min(n, std::max<std::size_t>(keep, 2));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < keep; ++i) {
    std::swap(idx[i], idx[i + static_cast<std::size_t>(rng() % (n - i))]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  Trajectory q;
  q.id = std::move(id);
  for (std::size_t i : idx) {
    Point p = source.points[i];
    if (jitter > 0.0) {
      const double r = jitter * std::sqrt(uniform01(rng));
      const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      p.loc = {p.loc.x + r * std::cos(a), p.loc.y + r * std::sin(a)};
    }
    q.points.push_back(p);
  }
  q = quantized(std::move(q));
  validate(q);
  return q;
}

}  // namespace ftm
