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
#ifndef FTM_SYNTH_H_
#define FTM_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ftm/bpl.h"
#include "ftm/geometry.h"

namespace ftm {

// Random-waypoint corpus with spatial skew: waypoints are drawn around a
// few hotspots most of the time, uniformly otherwise. A fraction of the
// trajectories are companions that shadow an earlier one at a small
// offset, so queries have true matches beyond their own source.
struct SynthParams {
  double extent = 20000.0;        // square side in meters, origin at 0
  std::size_t hotspots = 6;
  double hotspot_sigma = 600.0;   // Gaussian spread around a hotspot
  double hotspot_share = 0.85;    // waypoints drawn near a hotspot
  std::size_t min_points = 20;
  std::size_t max_points = 40;
  double min_speed = 4.0;         // m/s
  double max_speed = 15.0;
  double min_interval = 20.0;     // seconds between samples
  double max_interval = 60.0;
  double day = 86400.0;           // start times are uniform in [0, day)
  double companion_share = 0.1;
  double companion_offset = 75.0; // max displacement of a companion point
};

// Deterministic in (n, params, seed). Ids are "t000000", "t000001", ...
// Output is quantized and satisfies the trajectory data model.
std::vector<Trajectory> generate_corpus(std::size_t n, const SynthParams& params,
                                        std::uint64_t seed);

// Keeps round(rate * |source|) points (at least 2, or all of a shorter
// source) chosen uniformly, in time order, optionally moved by up to
// `jitter` meters. The result is quantized.
Trajectory sample_query(const Trajectory& source, double rate, Rng& rng,
                        double jitter = 0.0, std::string id = "q");

}  // namespace ftm

#endif  // FTM_SYNTH_H_
