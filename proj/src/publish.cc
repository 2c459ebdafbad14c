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
#include "ftm/publish.h"

#include <algorithm>
#include <cmath>

#include "ftm/errors.h"

namespace ftm {

std::size_t publish_quota(double rho, std::size_t query_size) {
  // The 1e-9 keeps products such as 0.6 * 10 from flooring to 5.
  return static_cast<std::size_t>(
      std::floor(rho * static_cast<double>(query_size) + 1e-9));
}

PublishedQuery publish(const Trajectory& query, const PrivacyParams& params,
                       const NoiseBound& bound, const GridSpec& spec,
                       double tau, Rng& rng) {
  if (query.points.empty()) throw DomainError("publish: empty query");
  params.validate();
  if (std::fabs(spec.cell_size - bound.grid_size) >
      1e-9 * std::max(1.0, bound.grid_size)) {
    throw ConfigError("publish: grid cell size " +
                      std::to_string(spec.cell_size) +
                      " differs from the solved grid size " +
                      std::to_string(bound.grid_size));
  }

  // Perturbation then Grid-Selection; only the cell of x' is kept, and
  // only when it agrees with the cell of x.
  std::vector<std::size_t> candidates;
  std::vector<GridId> candidate_grids;
  for (std::size_t i = 0; i < query.points.size(); ++i) {
    const Vec2 x = query.points[i].loc;
    const Vec2 perturbed = bpl_perturb(x, bound, params.epsilon, rng);
    const GridId g = spec.cell_of(perturbed);
    if (g == spec.cell_of(x)) {
      candidates.push_back(i);
      candidate_grids.push_back(g);
    }
  }
  const std::size_t quota = publish_quota(params.rho, query.points.size());
  if (candidates.empty() || quota == 0) {
    throw PublishFailure(candidates.empty()
                             ? "publish: no perturbed location stayed in its cell"
                             : "publish: floor(rho * |T_Q|) is zero");
  }

  // Partial Fisher-Yates over candidate positions.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take = std::min(quota, order.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t span = order.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  std::sort(order.begin(), order.end());

  PublishedQuery out;
  out.spec = spec;
  out.tau = tau;
  out.subquery.id = query.id;
  for (std::size_t k : order) {
    const std::size_t i = candidates[k];
    out.selected.push_back(i);
    out.subquery.points.push_back(query.points[i]);
    const GridId g = candidate_grids[k];
    if (std::find(out.grids.begin(), out.grids.end(), g) == out.grids.end()) {
      out.grids.push_back(g);
    }
  }
  return out;
}

}  // namespace ftm
