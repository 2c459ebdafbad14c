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
#include "ftm/client.h"

#include <algorithm>
#include <chrono>
#include <future>

#include "framed_connection.h"
#include "ftm/errors.h"
#include "ftm/log.h"
#include "ftm/secure_verify.h"

namespace ftm {
namespace {

using internal::FramedConnection;
using Clock = std::chrono::steady_clock;

// Answers one batch of Open messages with sealed inputs and reads the
// Result batch. Returns the match bits in session order.
std::vector<bool> answer_sessions(FramedConnection& conn, const Frame& open_frame,
                                  VerifyRole role, std::span<const Point> points,
                                  const QueryKey& key, OwnerRun& run) {
  const MessageType type = session_message(role);
  const SessionBatch open = decode_session_batch(open_frame.body);
  if (open.phase != SessionPhase::kOpen || open.opens.empty()) {
    throw ProtocolError(ProtocolErrorCode::kUnexpectedMessage,
                        "expected a non-empty session Open batch");
  }
  const bool prune = role == VerifyRole::kReferencePrune;
  conn.learn(false, prune ? fact::kReferenceLengths : fact::kCandidateLengths);

  SessionBatch input{SessionPhase::kInput, {}, {}, {}};
  input.inputs.reserve(open.opens.size());
  for (std::size_t i = 0; i < open.opens.size(); ++i) {
    const SessionOpen& o = open.opens[i];
    if (o.session_id != i) {
      throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                          "session ids out of order");
    }
    if (o.query_length != points.size()) {
      throw ProtocolError(ProtocolErrorCode::kLengthMismatch,
                          "owner expects " + std::to_string(o.query_length) +
                              " query points, client holds " +
                              std::to_string(points.size()));
    }
    run.comparisons += static_cast<std::uint64_t>(o.query_length) * o.owner_length;
    input.inputs.push_back({o.session_id, seal_session_input(key, role, o.session_id, points)});
  }
  conn.send(type, encode(input));
  conn.learn(true, prune ? fact::kSubqueryLength : fact::kQueryLength);

  const SessionBatch result = decode_session_batch(conn.expect(type).body);
  if (result.phase != SessionPhase::kResult ||
      result.results.size() != open.opens.size()) {
    throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                        "result batch does not answer the open batch");
  }
  conn.learn(false, fact::kMatchBits);
  conn.learn(true, fact::kMatchBits);
  std::vector<bool> bits;
  bits.reserve(result.results.size());
  for (std::size_t i = 0; i < result.results.size(); ++i) {
    if (result.results[i].session_id != i) {
      throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                          "session results out of order");
    }
    bits.push_back(result.results[i].match);
  }
  return bits;
}

}  // namespace

PublishedQuery publish_with_retry(const Trajectory& query,
                                  const QueryOptions& options,
                                  const NoiseBound& bound, Rng& rng) {
  const unsigned attempts = std::max(1u, options.publish_attempts);
  for (unsigned i = 1;; ++i) {
    try {
      return publish(query, options.privacy, bound, options.spec, options.tau, rng);
    } catch (const PublishFailure& e) {
      if (i >= attempts) throw;
      log_warning(std::string(e.what()) +
                  "; retrying with fresh randomness (privacy cost of repeated "
                  "attempts is not accounted for)");
    }
  }
}

OwnerRun query_owner(ByteStream& stream, const Trajectory& query,
                     const PublishedQuery* published,
                     const QueryOptions& options) {
  const auto t0 = Clock::now();
  const std::uint64_t sent0 = stream.bytes_sent();
  const std::uint64_t received0 = stream.bytes_received();
  const bool naive = options.mode == QueryMode::kNaive;
  if (query.points.empty()) throw DomainError("query_owner: empty query");
  if (!naive && (published == nullptr || published->grids.empty())) {
    throw DomainError("query_owner: filtered mode needs published grids");
  }

  OwnerRun run;
  run.transcript = Transcript(options.retain_frames);
  FramedConnection conn(stream, &run.transcript, /*is_owner=*/false);

  conn.send(MessageType::kHello, encode(Hello{options.spec, options.tau}));
  conn.learn(true, {fact::kGridOrigin, fact::kCellSize, fact::kTau});
  const HelloAck ack = decode_hello_ack(conn.expect(MessageType::kHelloAck).body);
  run.database_size = ack.database_size;
  if (ack.database_size) conn.learn(false, fact::kDatabaseSize);

  const QueryKey key = generate_query_key();
  PublishGrids pub;
  pub.mode = options.mode;
  pub.tau = options.tau;
  pub.cell_size = options.spec.cell_size;
  pub.query_length = static_cast<std::uint32_t>(query.points.size());
  pub.sealed_key = seal_query_key(key, ack.evaluator_key);
  if (!naive) {
    pub.subquery_length = static_cast<std::uint32_t>(published->subquery.points.size());
    pub.grids = published->grids;
  }
  conn.send(MessageType::kPublishGrids, encode(pub));
  conn.learn(true, {fact::kQueryMode, fact::kTau, fact::kCellSize, fact::kQueryLength});
  if (!naive) conn.learn(true, {fact::kPublishedGrids, fact::kSubqueryLength});

  const FilterStats fs = decode_filter_stats(conn.expect(MessageType::kFilterStats).body);
  conn.learn(false, {fact::kCandidateCount, fact::kPartitionCount});
  run.candidates = fs.candidates;
  run.partitions = fs.partitions;

  std::size_t validated_matches = 0;
  bool pruned = false;
  bool validated = false;
  for (;;) {
    Frame f = conn.receive();
    if (f.type == MessageType::kPruneSession && !naive && !pruned && !validated) {
      const std::vector<bool> bits =
          answer_sessions(conn, f, VerifyRole::kReferencePrune,
                          published->subquery.points, key, run);
      if (bits.size() != fs.partitions) {
        throw ProtocolError(ProtocolErrorCode::kSessionMismatch,
                            "prune sessions differ from the partition count");
      }
      run.prune_sessions = bits.size();
      run.surviving = static_cast<std::uint32_t>(std::count(bits.begin(), bits.end(), true));
      pruned = true;
    } else if (f.type == MessageType::kValidateSession && !validated) {
      const std::vector<bool> bits = answer_sessions(
          conn, f, VerifyRole::kFinalValidate, query.points, key, run);
      run.validate_sessions = bits.size();
      validated_matches = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
      validated = true;
    } else if (f.type == MessageType::kResultSet) {
      ResultSet rs = decode_result_set(f.body);
      if (rs.ids.size() != validated_matches) {
        throw ProtocolError(ProtocolErrorCode::kMalformed,
                            "result set disagrees with the validation bits");
      }
      if (!rs.ids.empty()) conn.learn(false, fact::kMatchedIds);
      run.ids = std::move(rs.ids);
      break;
    } else if (f.type == MessageType::kError) {
      conn.learn(false, fact::kErrorText);
      const ErrorMessage e = decode_error(f.body);
      throw ProtocolError(ProtocolErrorCode::kRemote,
                          "peer error " + std::to_string(static_cast<int>(e.code)) +
                              ": " + e.text);
    } else {
      throw ProtocolError(ProtocolErrorCode::kUnexpectedMessage,
                          std::string("unexpected ") + to_string(f.type));
    }
  }
  stream.close();
  run.bytes_up = stream.bytes_sent() - sent0;
  run.bytes_down = stream.bytes_received() - received0;
  run.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return run;
}

std::uint64_t FederationResult::bytes_up() const {
  std::uint64_t s = 0;
  for (const auto& o : owners) s += o.bytes_up;
  return s;
}
std::uint64_t FederationResult::bytes_down() const {
  std::uint64_t s = 0;
  for (const auto& o : owners) s += o.bytes_down;
  return s;
}
std::uint64_t FederationResult::candidates() const {
  std::uint64_t s = 0;
  for (const auto& o : owners) s += o.candidates;
  return s;
}
std::uint32_t FederationResult::partitions() const {
  std::uint32_t s = 0;
  for (const auto& o : owners) s += o.partitions;
  return s;
}
std::uint32_t FederationResult::surviving() const {
  std::uint32_t s = 0;
  for (const auto& o : owners) s += o.surviving;
  return s;
}
std::uint64_t FederationResult::comparisons() const {
  std::uint64_t s = 0;
  for (const auto& o : owners) s += o.comparisons;
  return s;
}
std::uint64_t FederationResult::sessions() const {
  std::uint64_t s = 0;
  for (const auto& o : owners) s += o.prune_sessions + o.validate_sessions;
  return s;
}

FederationResult query_federation(const std::vector<std::string>& owners,
                                  const Connector& connect,
                                  const Trajectory& query,
                                  const QueryOptions& options,
                                  std::uint64_t seed) {
  if (owners.empty()) throw ConfigError("query_federation: no owners given");
  const auto t0 = Clock::now();
  FederationResult out;
  PublishedQuery published;
  if (options.mode == QueryMode::kFiltered) {
    const NoiseBound bound = solve_noise_bound(options.privacy);
    Rng rng(seed);
    published = publish_with_retry(query, options, bound, rng);
    out.grids = published.grids.size();
    out.subquery_length = published.subquery.points.size();
  }

  std::vector<std::future<OwnerRun>> pending;
  pending.reserve(owners.size());
  for (std::size_t i = 0; i < owners.size(); ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      std::unique_ptr<ByteStream> stream = connect(i);
      OwnerRun run = query_owner(*stream, query, &published, options);
      run.owner = owners[i];
      return run;
    }));
  }
  std::vector<std::string> failed;
  std::string message;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      out.owners.push_back(pending[i].get());
    } catch (const std::exception& e) {
      failed.push_back(owners[i]);
      message += (message.empty() ? "" : "; ") + owners[i] + ": " + e.what();
    }
  }
  if (!failed.empty()) {
    throw FederationError(failed, std::to_string(failed.size()) + " of " +
                                      std::to_string(owners.size()) +
                                      " owners failed: " + message);
  }
  for (const auto& run : out.owners) {
    out.ids.insert(out.ids.end(), run.ids.begin(), run.ids.end());
  }
  std::sort(out.ids.begin(), out.ids.end());
  out.ids.erase(std::unique(out.ids.begin(), out.ids.end()), out.ids.end());
  out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return out;
}

Connector tcp_connector(const std::vector<std::string>& owners) {
  std::vector<Endpoint> endpoints;
  endpoints.reserve(owners.size());
  for (const auto& o : owners) endpoints.push_back(parse_endpoint(o));
  return [endpoints](std::size_t i) { return tcp_connect(endpoints.at(i)); };
}

}  // namespace ftm
