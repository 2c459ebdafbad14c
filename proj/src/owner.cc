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
#include "ftm/owner.h"

#include <chrono>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "framed_connection.h"
#include "ftm/errors.h"
#include "ftm/log.h"
#include "ftm/trajectory_io.h"

namespace ftm {
namespace {

using internal::FramedConnection;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<FixedSegment> fixed_segments(std::span<const Segment> segs) {
  std::vector<FixedSegment> out;
  out.reserve(segs.size());
  for (const Segment& s : segs) out.push_back(to_fixed(s));
  return out;
}

// One owner-held input of a session batch.
struct PendingSession {
  const std::vector<FixedSegment>* owner = nullptr;
  std::vector<FixedSegment> storage;  // used when owner is not shared
};

struct PhaseOutcome {
  std::vector<bool> matches;
  std::uint64_t comparisons = 0;
};

// Open, Input and Result exchange for one batch of sessions. Session ids
// are the batch positions.
PhaseOutcome run_phase(FramedConnection& conn, const OwnerNode& node,
                       VerifyRole role, std::vector<PendingSession>& sessions,
                       std::uint32_t query_length, const QueryKey& key,
                       std::int64_t tau) {
  const MessageType type = session_message(role);
  const bool prune = role == VerifyRole::kReferencePrune;
  const auto n = static_cast<std::uint32_t>(sessions.size());

  SessionBatch open{SessionPhase::kOpen, {}, {}, {}};
  open.opens.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    open.opens.push_back(
        {i, static_cast<std::uint32_t>(sessions[i].owner->size()), query_length});
  }
  conn.send(type, encode(open));
  conn.learn(false, prune ? fact::kReferenceLengths : fact::kCandidateLengths);

  const SessionBatch input = decode_session_batch(conn.expect(type).body);
  if (input.phase != SessionPhase::kInput || input.inputs.size() != n) {
    throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                        "expected " + std::to_string(n) + " session inputs");
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (input.inputs[i].session_id != i) {
      throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                          "session inputs out of order");
    }
  }
  conn.learn(true, prune ? fact::kSubqueryLength : fact::kQueryLength);

  SessionBatch result{SessionPhase::kResult, {}, {}, {}};
  result.results.resize(n);
  std::vector<std::uint64_t> comparisons(n, 0);
  auto evaluate = [&](std::uint32_t i) {
    auto session = node.evaluator().open_session(input.inputs[i].blob, &key, role,
                                                 i, query_length);
    const bool bit = secure_match(*session, *sessions[i].owner, tau);
    result.results[i] = {i, bit, session->traffic()};
    comparisons[i] = session->comparisons();
  };

  const unsigned workers =
      std::min<unsigned>(node.settings().parallelism, std::max<std::uint32_t>(n, 1));
  if (workers <= 1) {
    for (std::uint32_t i = 0; i < n; ++i) evaluate(i);
  } else {
    std::mutex mu;
    std::exception_ptr failure;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::uint32_t i = w; i < n; i += workers) evaluate(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  conn.send(type, encode(result));
  conn.learn(true, fact::kMatchBits);
  conn.learn(false, fact::kMatchBits);

  PhaseOutcome out;
  out.matches.reserve(n);
  for (const auto& r : result.results) out.matches.push_back(r.match);
  for (auto c : comparisons) out.comparisons += c;
  return out;
}

}  // namespace

OwnerSettings settings_of(const OwnerConfig& config) {
  OwnerSettings s;
  s.spec = config.spec;
  s.tau = config.tau;
  s.partition = config.partition;
  s.cost = config.cost;
  s.parallelism = config.parallelism;
  s.disclose_database_size = config.disclose_database_size;
  return s;
}

OwnerNode::OwnerNode(OwnerSettings settings, std::vector<Trajectory> db,
                     GridIndex index)
    : settings_(std::move(settings)),
      db_(std::move(db)),
      index_(std::move(index)),
      evaluator_(settings_.cost) {
  if (!(index_.spec == settings_.spec) || index_.tau != settings_.tau) {
    throw ConfigError("index was built for a different grid or tau than configured");
  }
  prune_threshold(settings_.tau, settings_.spec.cell_size);  // L > tau
  threshold_to_fixed(prune_threshold(settings_.tau, settings_.spec.cell_size));
  fixed_segments_.reserve(db_.size());
  for (const Trajectory& t : db_) {
    fixed_segments_.push_back(fixed_segments(segments_of(t)));
  }
}

OwnerNode::OwnerNode(OwnerSettings settings, std::vector<Trajectory> db)
    : OwnerNode(settings, db,
                build_index(db, settings.tau, settings.spec,
                            std::max(1u, settings.parallelism))) {}

OwnerQueryStats OwnerNode::handle(ByteStream& stream, Transcript* transcript) const {
  FramedConnection conn(stream, transcript, /*is_owner=*/true);
  OwnerQueryStats stats;
  try {
    // Handshake: both sides must use the same tessellation and tau.
    const Hello hello = decode_hello(conn.expect(MessageType::kHello).body);
    conn.learn(true, {fact::kGridOrigin, fact::kCellSize, fact::kTau});
    if (!(hello.spec == settings_.spec) || hello.tau != settings_.tau) {
      throw ProtocolError(ProtocolErrorCode::kTessellationMismatch,
                          "client grid/tau differ from this federation's");
    }
    HelloAck ack;
    ack.evaluator_key = evaluator_.public_key();
    if (settings_.disclose_database_size) {
      ack.database_size = db_.size();
      conn.learn(false, fact::kDatabaseSize);
    }
    conn.send(MessageType::kHelloAck, encode(ack));

    const PublishGrids pub =
        decode_publish_grids(conn.expect(MessageType::kPublishGrids).body);
    conn.learn(true, {fact::kQueryMode, fact::kTau, fact::kCellSize});
    if (pub.tau != settings_.tau || pub.cell_size != settings_.spec.cell_size) {
      throw ProtocolError(ProtocolErrorCode::kTessellationMismatch,
                          "published tau/L differ from the handshake");
    }
    if (pub.query_length == 0) {
      throw ProtocolError(ProtocolErrorCode::kMalformed, "empty query");
    }
    conn.learn(true, fact::kQueryLength);
    const QueryKey key = evaluator_.open_query_key(pub.sealed_key);
    stats.mode = pub.mode;
    stats.grids = pub.grids.size();

    std::vector<TrajId> validate_ids;
    if (pub.mode == QueryMode::kNaive) {
      stats.candidates = db_.size();
      conn.send(MessageType::kFilterStats, encode(FilterStats{db_.size(), 0}));
      conn.learn(false, {fact::kCandidateCount, fact::kPartitionCount});
      validate_ids.resize(db_.size());
      for (TrajId i = 0; i < db_.size(); ++i) validate_ids[i] = i;
    } else {
      if (pub.grids.empty() || pub.subquery_length == 0) {
        throw ProtocolError(ProtocolErrorCode::kEmptyGrids,
                            "filtered query without published grids");
      }
      conn.learn(true, {fact::kPublishedGrids, fact::kSubqueryLength});
      auto t0 = Clock::now();
      const std::vector<TrajId> tc = filter(index_, pub.grids);
      stats.candidates = tc.size();
      if (tc.empty()) {
        stats.filter_ms = ms_since(t0);
        conn.send(MessageType::kFilterStats, encode(FilterStats{0, 0}));
        conn.learn(false, {fact::kCandidateCount, fact::kPartitionCount});
        conn.send(MessageType::kResultSet, encode(ResultSet{}));
        return stats;
      }
      const PresenceTable presence(
          tc, pub.grids, settings_.tau, settings_.spec,
          [this](TrajId id) -> const Trajectory& { return db_[id]; });
      const std::vector<Partition> parts =
          partition(tc, presence, settings_.partition.max_size(tc.size()));
      stats.partitions = static_cast<std::uint32_t>(parts.size());
      stats.filter_ms = ms_since(t0);
      conn.send(MessageType::kFilterStats,
                encode(FilterStats{tc.size(), stats.partitions}));
      conn.learn(false, {fact::kCandidateCount, fact::kPartitionCount});

      t0 = Clock::now();
      std::vector<PendingSession> prune(parts.size());
      for (std::size_t i = 0; i < parts.size(); ++i) {
        prune[i].storage =
            fixed_segments(reference_trajectory(parts[i], presence).segments);
        prune[i].owner = &prune[i].storage;
      }
      const std::int64_t tau_prune = threshold_to_fixed(
          prune_threshold(settings_.tau, settings_.spec.cell_size));
      const PhaseOutcome pruned =
          run_phase(conn, *this, VerifyRole::kReferencePrune, prune,
                    pub.subquery_length, key, tau_prune);
      stats.prune_sessions = parts.size();
      stats.comparisons += pruned.comparisons;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!pruned.matches[i]) continue;
        ++stats.surviving;
        validate_ids.insert(validate_ids.end(), parts[i].members.begin(),
                            parts[i].members.end());
      }
      stats.prune_ms = ms_since(t0);
    }

    if (!validate_ids.empty()) {
      const auto t0 = Clock::now();
      std::vector<PendingSession> sessions(validate_ids.size());
      for (std::size_t i = 0; i < validate_ids.size(); ++i) {
        sessions[i].owner = &fixed_segments_[validate_ids[i]];
      }
      const PhaseOutcome validated =
          run_phase(conn, *this, VerifyRole::kFinalValidate, sessions,
                    pub.query_length, key, threshold_to_fixed(settings_.tau));
      stats.validate_sessions = validate_ids.size();
      stats.comparisons += validated.comparisons;
      for (std::size_t i = 0; i < validate_ids.size(); ++i) {
        if (validated.matches[i]) stats.matched.push_back(db_[validate_ids[i]].id);
      }
      stats.validate_ms = ms_since(t0);
    }

    conn.send(MessageType::kResultSet, encode(ResultSet{stats.matched}));
    if (!stats.matched.empty()) conn.learn(false, fact::kMatchedIds);
    return stats;
  } catch (const ProtocolError& e) {
    if (e.code() != ProtocolErrorCode::kRemote) conn.send_error(e.code(), e.what());
    throw;
  } catch (const TransportError&) {
    throw;
  } catch (const std::exception& e) {
    conn.send_error(ProtocolErrorCode::kInternal, e.what());
    throw;
  }
}

OwnerServer::OwnerServer(std::shared_ptr<const OwnerNode> node,
                         const Endpoint& listen)
    : node_(std::move(node)), listener_(listen) {}

void OwnerServer::run() {
  std::vector<std::jthread> connections;
  while (!stopping_.load()) {
    std::unique_ptr<ByteStream> stream = listener_.accept();
    if (!stream) break;
    connections.emplace_back([node = node_, s = std::move(stream)]() mutable {
      try {
        node->handle(*s);
      } catch (const std::exception& e) {
        log_warning(std::string("query connection ended: ") + e.what());
      }
    });
  }
}

void OwnerServer::stop() {
  stopping_.store(true);
  listener_.shutdown();
}

void serve(const OwnerConfig& config, bool rebuild_index) {
  if (config.database_path.empty()) throw ConfigError("no database path configured");
  std::vector<Trajectory> db = read_ndjson_file(config.database_path);
  const OwnerSettings settings = settings_of(config);
  GridIndex index;
  const bool have_file =
      !config.index_path.empty() && std::filesystem::exists(config.index_path);
  if (have_file && !rebuild_index) {
    index = load_index(config.index_path);
  } else {
    index = build_index(db, settings.tau, settings.spec,
                        std::max(1u, settings.parallelism));
    if (!config.index_path.empty()) persist_index(index, config.index_path);
  }
  auto node = std::make_shared<const OwnerNode>(settings, std::move(db), std::move(index));
  OwnerServer server(node, parse_endpoint(config.listen));
  log_info("owner listening on port " + std::to_string(server.port()) + " with " +
           std::to_string(node->database().size()) + " trajectories");
  server.run();
}

}  // namespace ftm
