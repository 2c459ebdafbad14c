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
#include "ftm/bpl.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "ftm/errors.h"
#include "ftm/log.h"
#include "ftm/planar_laplace.h"

namespace ftm {
namespace {

constexpr double kDeltaLow = 1e-15;
constexpr double kDeltaHigh = 1.0 - 1e-12;

double radius_for_tail(double epsilon, double tail) {
  return laplace_cdf_inverse(epsilon, 1.0 - tail);
}

double fixed_point_gap(double tail, const PrivacyParams& params) {
  const double r = radius_for_tail(params.epsilon, tail);
  return tail - params.delta * std::numbers::pi * r * r;
}

std::string describe(const PrivacyParams& p) {
  std::ostringstream os;
  os << "epsilon=" << p.epsilon << ", delta=" << p.delta;
  return os.str();
}

}  // namespace

void PrivacyParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be a positive finite number");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  if (p0 < kMinSuccessProbability) {
    throw ConfigError(
        "p0 must be >= 0.7: smaller targets give a grid size below 3R, where "
        "the success-probability bound is not established");
  }
}

double grid_size_for(double radius, double p0) {
  if (!(radius > 0.0)) throw DomainError("grid_size_for: radius must be > 0");
  if (!(p0 > 0.0 && p0 < 1.0)) throw DomainError("grid_size_for: p0 in (0,1)");
  return radius / (2.0 * (1.0 - std::sqrt(p0)));
}

NoiseBound solve_noise_bound(const PrivacyParams& params) {
  params.validate();
  // g(lo) < 0 since R explodes as Delta -> 0; g(hi) > 0 as R -> 0. Scan a
  // log-spaced ladder to land on the first sign change, i.e. the smallest
  // root, then bisect.
  double lo = kDeltaLow;
  double g_lo = fixed_point_gap(lo, params);
  if (!(g_lo < 0.0)) {
    log_warning("Delta bracket does not change sign at the lower end for " +
                describe(params));
    throw ConfigError("no Delta fixed point bracketed in (1e-15, 1-1e-12) for " +
                      describe(params));
  }
  double hi = lo;
  bool found = false;
  for (int i = 1; i <= 300; ++i) {
    const double t = std::exp(std::log(kDeltaLow) +
                              (std::log(kDeltaHigh) - std::log(kDeltaLow)) *
                                  i / 300.0);
    const double g = fixed_point_gap(t, params);
    if (g >= 0.0) {
      hi = t;
      found = true;
      break;
    }
    lo = t;
  }
  if (!found) {
    log_warning("Delta bracket does not change sign for " + describe(params));
    throw ConfigError("no Delta fixed point bracketed in (1e-15, 1-1e-12) for " +
                      describe(params));
  }
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fixed_point_gap(mid, params) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever end sits closer to the root.
  const double tail = std::fabs(fixed_point_gap(lo, params)) <
                              std::fabs(fixed_point_gap(hi, params))
                          ? lo
                          : hi;
  NoiseBound bound;
  bound.tail_mass = tail;
  bound.radius = radius_for_tail(params.epsilon, tail);
  bound.grid_size = grid_size_for(bound.radius, params.p0);
  return bound;
}

double fixed_point_residual(const NoiseBound& bound, double delta) {
  return std::fabs(bound.tail_mass -
                   delta * std::numbers::pi * bound.radius * bound.radius) /
         bound.tail_mass;
}

BplRadius bpl_radius(double p, double u, const NoiseBound& bound,
                     double epsilon) {
  if (p <= 1.0 - bound.tail_mass) {
    // The Laplace radius at p = 1 - Delta is exactly R; clamp guards the
    // last ulp.
    const double r = laplace_cdf_inverse(epsilon, p);
    return {r < bound.radius ? r : bound.radius, false};
  }
  return {bound.radius * std::sqrt(u), true};
}

BplSample bpl_sample(const NoiseBound& bound, double epsilon, Rng& rng) {
  const double p = uniform01(rng);
  const double u = uniform01(rng);
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  const BplRadius r = bpl_radius(p, u, bound, epsilon);
  BplSample s;
  s.radius = r.radius;
  s.uniform_branch = r.uniform_branch;
  s.angle = theta;
  s.offset = {r.radius * std::cos(theta), r.radius * std::sin(theta)};
  return s;
}

Vec2 bpl_perturb(Vec2 x, const NoiseBound& bound, double epsilon, Rng& rng) {
  return x + bpl_sample(bound, epsilon, rng).offset;
}

double bpl_radius_cdf(double r, const NoiseBound& bound, double epsilon) {
  if (r <= 0.0) return 0.0;
  if (r >= bound.radius) return 1.0;
  const double frac = r / bound.radius;
  return laplace_cdf(epsilon, r) + bound.tail_mass * frac * frac;
}

}  // namespace ftm
