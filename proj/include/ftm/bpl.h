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
#ifndef FTM_BPL_H_
#define FTM_BPL_H_

#include <cstdint>
#include <random>

#include "ftm/geometry.h"

namespace ftm {

// Seedable random source injected by callers.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw. Defined here
// rather than via std::uniform_real_distribution so the stream is the same
// on every standard library.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct PrivacyParams {
  double epsilon = 0.01;  // 1/m
  double delta = 1e-5;    // 1/m^2
  double rho = 0.6;       // publishing rate
  double p0 = 0.81;       // target in-cell success probability

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Lowest admissible p0: below it L < 3R and the center/side/corner
// decomposition behind the grid-size bound no longer applies.
inline constexpr double kMinSuccessProbability = 0.7;

struct NoiseBound {
  double tail_mass = 0.0;    // Delta
  double radius = 0.0;       // R, noise-circle radius
  double grid_size = 0.0;    // L
};

// Grid side guaranteeing in-cell success >= p0 for noise radius R:
// L = R / (2 (1 - sqrt(p0))).
double grid_size_for(double radius, double p0);

// Solves Delta = delta * pi * [C^{-1}_eps(1 - Delta)]^2 (smallest root in
// (1e-15, 1 - 1e-12)), then R and L. Throws ConfigError when no root is
// bracketed.
NoiseBound solve_noise_bound(const PrivacyParams& params);

// Residual |Delta - delta pi R^2| / Delta of a solved bound.
double fixed_point_residual(const NoiseBound& bound, double delta);

// One radial draw of the bounded planar Laplace mechanism from its two
// uniforms: p selects the branch and the Laplace radius, u the uniform
// in-disc radius (r^2 uniform on [0, R^2]).
struct BplRadius {
  double radius = 0.0;
  bool uniform_branch = false;
};
BplRadius bpl_radius(double p, double u, const NoiseBound& bound,
                     double epsilon);

struct BplSample {
  Vec2 offset;
  double radius = 0.0;
  double angle = 0.0;
  bool uniform_branch = false;
};

BplSample bpl_sample(const NoiseBound& bound, double epsilon, Rng& rng);

// x plus a bounded planar Laplace offset; never farther than bound.radius.
Vec2 bpl_perturb(Vec2 x, const NoiseBound& bound, double epsilon, Rng& rng);

// Analytic radius CDF of the mechanism: C_eps(r) + Delta r^2 / R^2 on
// [0, R], 1 beyond.
double bpl_radius_cdf(double r, const NoiseBound& bound, double epsilon);

}  // namespace ftm

#endif  // FTM_BPL_H_
