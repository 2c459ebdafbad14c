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
#ifndef FTM_PUBLISH_H_
#define FTM_PUBLISH_H_

#include <cstddef>
#include <vector>

#include "ftm/bpl.h"
#include "ftm/geometry.h"
#include "ftm/grid.h"

namespace ftm {

// Client-side result of grid-level publishing. Only `grids` leaves the
// client; `subquery` and `selected` stay private.
struct PublishedQuery {
  std::vector<GridId> grids;      // G_Q, duplicate-free, no timestamps
  Trajectory subquery;            // T_Q', the points that generated G_Q
  std::vector<std::size_t> selected;  // indices of T_Q' points inside T_Q
  GridSpec spec;
  double tau = 0.0;
};

// Number of grids drawn from the candidate list: floor(rho * n).
std::size_t publish_quota(double rho, std::size_t query_size);

// Perturbs every query location with BPL, keeps those whose perturbed
// cell equals the true cell, samples floor(rho |T_Q|) of them uniformly
// without replacement, then drops repeated grids.
//
// Throws DomainError for an empty query, ConfigError when spec's cell
// size differs from bound.grid_size, and PublishFailure when nothing is
// left to publish (the caller may retry with fresh randomness).
PublishedQuery publish(const Trajectory& query, const PrivacyParams& params,
                       const NoiseBound& bound, const GridSpec& spec,
                       double tau, Rng& rng);

}  // namespace ftm

#endif  // FTM_PUBLISH_H_
