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
#ifndef FTM_CLIENT_H_
#define FTM_CLIENT_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftm/bpl.h"
#include "ftm/channel.h"
#include "ftm/publish.h"
#include "ftm/transcript.h"
#include "ftm/wire.h"

namespace ftm {

struct QueryOptions {
  QueryMode mode = QueryMode::kFiltered;
  PrivacyParams privacy;
  GridSpec spec;  // cell_size must equal the L solved from `privacy`
  double tau = 50.0;
  bool retain_frames = false;   // keep raw frames in the transcripts
  unsigned publish_attempts = 16;
};

// Client-side view of one owner's run.
struct OwnerRun {
  std::string owner;
  std::vector<std::string> ids;
  std::uint64_t bytes_up = 0;    // client to owner
  std::uint64_t bytes_down = 0;  // owner to client
  std::uint64_t candidates = 0;  // |TC| (|TD| in naive mode)
  std::uint32_t partitions = 0;
  std::uint32_t surviving = 0;   // partitions whose rt matched (n_r)
  std::uint64_t prune_sessions = 0;
  std::uint64_t validate_sessions = 0;
  // Secure point-segment tests, from session lengths.
  std::uint64_t comparisons = 0;
  std::optional<std::uint64_t> database_size;  // only if disclosed
  double wall_ms = 0.0;
  Transcript transcript;
};

// Publishes the query for filtered mode, retrying with fresh randomness
// from `rng` on PublishFailure up to options.publish_attempts times.
PublishedQuery publish_with_retry(const Trajectory& query,
                                  const QueryOptions& options,
                                  const NoiseBound& bound, Rng& rng);

// Client side of one query against one owner. `published` is ignored in
// naive mode. Throws ProtocolError / TransportError.
OwnerRun query_owner(ByteStream& stream, const Trajectory& query,
                     const PublishedQuery* published,
                     const QueryOptions& options);

struct FederationResult {
  std::vector<std::string> ids;  // sorted union over owners
  std::size_t grids = 0;         // |G_Q|
  std::size_t subquery_length = 0;
  std::vector<OwnerRun> owners;
  double wall_ms = 0.0;

  std::uint64_t bytes_up() const;
  std::uint64_t bytes_down() const;
  std::uint64_t candidates() const;
  std::uint32_t partitions() const;
  std::uint32_t surviving() const;
  std::uint64_t comparisons() const;
  std::uint64_t sessions() const;
};

using Connector = std::function<std::unique_ptr<ByteStream>(std::size_t owner)>;

// Publishes once (seeded), sends the same G_Q to every owner concurrently
// and merges the results. Any owner failure raises FederationError naming
// every failed owner; no partial union is returned.
FederationResult query_federation(const std::vector<std::string>& owners,
                                  const Connector& connect,
                                  const Trajectory& query,
                                  const QueryOptions& options,
                                  std::uint64_t seed);

// Connector for "host:port" owner addresses.
Connector tcp_connector(const std::vector<std::string>& owners);

}  // namespace ftm

#endif  // FTM_CLIENT_H_
