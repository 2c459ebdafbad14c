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
#include "ftm/audit.h"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "ftm/errors.h"
#include "ftm/secure_verify.h"
#include "ftm/wire.h"

namespace ftm {
namespace {

void add_pattern(std::unordered_set<std::uint64_t>& out, std::uint64_t v) {
  int nonzero = 0;
  for (int i = 0; i < 8; ++i) nonzero += ((v >> (8 * i)) & 0xff) != 0;
  if (nonzero >= 3) out.insert(v);
}

std::unordered_set<std::uint64_t> patterns_of(const std::vector<Point>& points) {
  std::unordered_set<std::uint64_t> out;
  auto add_value = [&](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    add_pattern(out, bits);
    if (std::fabs(v / kQuantum) < static_cast<double>(kFixedLimit)) {
      add_pattern(out, static_cast<std::uint64_t>(to_fixed(v)));
    }
  };
  for (const Point& p : points) {
    add_value(p.ts);
    add_value(p.loc.x);
    add_value(p.loc.y);
  }
  return out;
}

bool contains_pattern(const Bytes& frame,
                      const std::unordered_set<std::uint64_t>& patterns) {
  if (patterns.empty()) return false;
  for (std::size_t i = 0; i + 8 <= frame.size(); ++i) {
    std::uint64_t v = 0;
    std::memcpy(&v, frame.data() + i, 8);
    if (patterns.count(v) != 0) return true;
  }
  return false;
}

// Facts a frame discloses to its receiver (and, for results, to the
// owner, whose evaluator produced them).
void facts_of(const MessageRecord& m, const Frame& f, LeakageLedger& out) {
  const bool to_owner = m.direction == Direction::kClientToOwner;
  auto& receiver = to_owner ? out.owner : out.client;
  switch (f.type) {
    case MessageType::kHello:
      decode_hello(f.body);
      receiver.insert({fact::kGridOrigin, fact::kCellSize, fact::kTau});
      break;
    case MessageType::kHelloAck:
      if (decode_hello_ack(f.body).database_size) receiver.insert(fact::kDatabaseSize);
      break;
    case MessageType::kPublishGrids: {
      const PublishGrids p = decode_publish_grids(f.body);
      receiver.insert({fact::kQueryMode, fact::kTau, fact::kCellSize});
      if (!p.grids.empty()) receiver.insert(fact::kPublishedGrids);
      if (p.query_length > 0) receiver.insert(fact::kQueryLength);
      if (p.subquery_length > 0) receiver.insert(fact::kSubqueryLength);
      break;
    }
    case MessageType::kFilterStats:
      decode_filter_stats(f.body);
      receiver.insert({fact::kCandidateCount, fact::kPartitionCount});
      break;
    case MessageType::kPruneSession:
    case MessageType::kValidateSession: {
      const bool prune = f.type == MessageType::kPruneSession;
      const SessionBatch b = decode_session_batch(f.body);
      switch (b.phase) {
        case SessionPhase::kOpen:
          if (!b.opens.empty()) {
            receiver.insert(prune ? fact::kReferenceLengths : fact::kCandidateLengths);
          }
          break;
        case SessionPhase::kInput:
          if (!b.inputs.empty()) {
            receiver.insert(prune ? fact::kSubqueryLength : fact::kQueryLength);
          }
          break;
        case SessionPhase::kResult:
          if (!b.results.empty()) {
            out.client.insert(fact::kMatchBits);
            out.owner.insert(fact::kMatchBits);
          }
          break;
      }
      break;
    }
    case MessageType::kResultSet:
      if (!decode_result_set(f.body).ids.empty()) receiver.insert(fact::kMatchedIds);
      break;
    case MessageType::kError:
      decode_error(f.body);
      receiver.insert(fact::kErrorText);
      break;
  }
}

void check_subset(const std::set<std::string>& learned,
                  const std::set<std::string>& allowed, const char* party,
                  std::vector<std::string>& violations) {
  for (const auto& f : learned) {
    if (allowed.count(f) == 0) {
      violations.push_back(std::string(party) + " learned disallowed fact '" + f + "'");
    }
  }
}

}  // namespace

AuditPolicy AuditPolicy::strict() {
  AuditPolicy p;
  p.owner_allowed = {fact::kGridOrigin, fact::kTau,          fact::kCellSize,
                     fact::kQueryMode,  fact::kPublishedGrids, fact::kQueryLength,
                     fact::kSubqueryLength, fact::kMatchBits};
  p.client_allowed = {fact::kMatchBits,        fact::kMatchedIds,
                      fact::kCandidateCount,   fact::kPartitionCount,
                      fact::kReferenceLengths, fact::kCandidateLengths};
  return p;
}

AuditReport audit_transcript(const Transcript& transcript,
                             const AuditSecrets& secrets,
                             const AuditPolicy& policy) {
  AuditReport report;
  if (!transcript.retains_frames()) {
    report.violations.push_back("transcript did not retain raw frames");
    return report;
  }
  const auto owner_patterns = patterns_of(secrets.owner_private);
  const auto query_patterns = patterns_of(secrets.query_private);

  for (std::size_t i = 0; i < transcript.messages().size(); ++i) {
    const MessageRecord& m = transcript.messages()[i];
    const std::string where = "message " + std::to_string(i) + " (" +
                              to_string(m.type) + ")";
    if (m.raw.size() != m.length || crc32_of(m.raw) != m.digest) {
      report.violations.push_back(where + ": raw frame disagrees with its record");
      continue;
    }
    try {
      std::size_t used = 0;
      const Frame f = decode_frame(m.raw, used);
      if (used != m.raw.size() || f.type != m.type) {
        report.violations.push_back(where + ": frame boundary mismatch");
        continue;
      }
      facts_of(m, f, report.recomputed);
    } catch (const ProtocolError& e) {
      report.violations.push_back(where + ": " + e.what());
      continue;
    }
    const bool to_client = m.direction == Direction::kOwnerToClient;
    if (to_client && contains_pattern(m.raw, owner_patterns)) {
      report.violations.push_back(where + ": owner-private value visible to the client");
    }
    if (!to_client && contains_pattern(m.raw, query_patterns)) {
      report.violations.push_back(where + ": query value visible to the owner");
    }
  }

  const LeakageLedger& claimed = transcript.ledger();
  for (const auto& f : report.recomputed.owner) {
    if (claimed.owner.count(f) == 0) {
      report.violations.push_back("owner ledger omits '" + f + "'");
    }
  }
  for (const auto& f : report.recomputed.client) {
    if (claimed.client.count(f) == 0) {
      report.violations.push_back("client ledger omits '" + f + "'");
    }
  }
  check_subset(report.recomputed.owner, policy.owner_allowed, "owner", report.violations);
  check_subset(report.recomputed.client, policy.client_allowed, "client", report.violations);
  check_subset(claimed.owner, policy.owner_allowed, "owner", report.violations);
  check_subset(claimed.client, policy.client_allowed, "client", report.violations);
  return report;
}

}  // namespace ftm
